use c1vem::meshio::{format_g17, mesh_to_string, parse_mesh, read_mesh, write_mesh};
use c1vem_core::mesh::{build_uniform_triangle_mesh, build_voronoi_mesh};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn g17_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let back: f64 = format_g17(x).parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }

    #[test]
    fn voronoi_round_trip_is_exact(cells in 1usize..60, seed in any::<u64>(), lloyd in 0usize..3) {
        let mesh = build_voronoi_mesh(cells, seed, lloyd).unwrap();
        let text = mesh_to_string(&mesh);
        let back = parse_mesh(&text).unwrap();
        prop_assert_eq!(&back, &mesh);
        prop_assert_eq!(mesh_to_string(&back), text);
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m.mesh");
    let mesh = build_uniform_triangle_mesh(5).unwrap();
    write_mesh(&mesh, &file).unwrap();
    assert_eq!(read_mesh(&file).unwrap(), mesh);
}
