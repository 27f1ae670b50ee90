//! Sample a random graph, round-trip it through the edge-list format and
//! test a hand-built tuple.

use emso_core::graph::{read_edge_list, sample_gnp, write_edge_list, Graph, Seed};
use emso_core::witness::{is_special, KTuple};

fn main() -> emso_core::Result<()> {
    let g = sample_gnp(12, 0.5, Seed::new(2024))?;
    let text = write_edge_list(&g);
    let back = read_edge_list(&text)?;
    assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    println!("G(12, 0.5) with seed 2024 has {} edges", g.edge_count());

    // Vertices 0,1,2 form a triangle; 3 and 4 see every set.
    let h = Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (3, 0), (3, 1), (3, 2), (4, 0), (4, 1), (4, 2)])?;
    let t: KTuple = "X1=1;x1=1;X2=2;x2=2;X3=3;x3=3".parse()?;
    println!("{t} special in h: {}", is_special(&h, &t)?);
    let bigger: KTuple = "X1=1,4;x1=1;X2=2;x2=2;X3=3;x3=3".parse()?;
    println!("{bigger} special in h: {}", is_special(&h, &bigger)?);
    Ok(())
}
