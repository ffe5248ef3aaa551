use crfem::multiindex::{counts_by_codim, validate_assumption};
use crfem::partition::partition_suite;
use crfem::{Kind, SmoothnessVector};

fn sv(v: &[i64]) -> SmoothnessVector {
    SmoothnessVector::new(v.to_vec()).unwrap()
}

#[test]
fn partition_suite_battery() {
    for r in [vec![1], vec![1, 2], vec![2, 4], vec![1, 2, 4]] {
        let r = sv(&r);
        let kmin = 2 * r.get(r.dim()) as u32 + 1;
        for k in kmin..=kmin + 2 {
            let rep = partition_suite(&r, k).unwrap();
            for c in &rep.checks {
                assert!(c.ok(), "r={r} k={k} {}: {:?}", c.name, c.witness);
                assert!(c.cases > 0);
            }
        }
    }
}

#[test]
fn golden_face_series() {
    let t = counts_by_codim(3, 33, &sv(&[4, 8, 16]), Kind::Primal).unwrap();
    let per: Vec<u64> = t.rows.iter().map(|r| r.total).collect();
    assert_eq!(per, vec![544, 1280, 1440, 3876]);
    let series: Vec<u64> = t.rows[1].orders.iter().map(|o| o.count).collect();
    assert_eq!(series, vec![28, 45, 63, 82, 102]);
    assert_eq!(t.total, 7140);
}

#[test]
fn assumption_boundary() {
    assert!(!validate_assumption(&sv(&[1, 3]), 6));
    assert!(validate_assumption(&sv(&[1, 3]), 7));
    assert!(!validate_assumption(&sv(&[2, 3]), 9));
}
