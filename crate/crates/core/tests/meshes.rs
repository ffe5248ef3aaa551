use std::path::PathBuf;

use crfem::mesh::{derham_check, global_dim, global_dim_closed_form_2d};
use crfem::{parse_mesh, Error, Mesh, SmoothnessVector};

fn fixture(name: &str) -> Mesh {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    parse_mesh(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn sv(v: &[i64]) -> SmoothnessVector {
    SmoothnessVector::new(v.to_vec()).unwrap()
}

#[test]
fn fixture_counts() {
    let cases = [
        ("square2.json", vec![4, 5, 2], 1),
        ("square8.json", vec![9, 16, 8], 1),
        ("lshape.json", vec![8, 13, 6], 1),
        ("annulus.json", vec![16, 32, 16], 0),
        ("tet.json", vec![4, 6, 4, 1], 1),
        ("patch3.json", vec![5, 9, 7, 2], 1),
    ];
    for (name, counts, chi) in cases {
        let m = fixture(name);
        assert_eq!(m.counts(), counts, "{name}");
        assert_eq!(m.euler_characteristic(), chi, "{name}");
    }
}

#[test]
fn overlap_fixture_is_rejected() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/overlap.json");
    let err = parse_mesh(&std::fs::read_to_string(path).unwrap()).unwrap_err();
    assert!(matches!(err, Error::Mesh(_)), "{err}");
}

#[test]
fn derham_on_fixtures() {
    for name in ["square2.json", "square8.json", "lshape.json", "annulus.json"] {
        let m = fixture(name);
        for (r, k) in [(vec![1, 2], 5), (vec![2, 4], 9), (vec![1, 2], 7), (vec![2, 4], 11), (vec![1, 3], 8)] {
            let rep = derham_check(&m, &sv(&r), k).unwrap();
            assert!(rep.matches, "{name} r={r:?} k={k}: {rep:?}");
            assert_eq!(rep.alternating_sum, m.euler_characteristic());
            for leg in &rep.legs {
                assert_eq!(global_dim_closed_form_2d(&m, &leg.r, leg.k).unwrap(), leg.dim);
            }
        }
    }
}

#[test]
fn tet_global_dim_is_element_dim() {
    let m = fixture("tet.json");
    assert_eq!(global_dim(&m, &sv(&[1, 2, 4]), 9).unwrap(), 220);
    assert!(derham_check(&m, &sv(&[1, 2, 4]), 9).is_err());
}
