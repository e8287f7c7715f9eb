use modinv::commutant::EnumerationOptions;
use modinv::cyclo::Rational;
use modinv::fusion::{builtin_cyclic, builtin_so_level1, builtin_su2, FusionRing};
use modinv::modular::compute_modular_data;
use modinv::pipeline::{parse_matrix, run, Target};
use modinv::report::Report;
use modinv::ringfile::{load_ring, RingFile};

fn rings() -> Vec<FusionRing> {
    let mut v: Vec<FusionRing> = (1..=8).map(builtin_su2).collect();
    v.push(builtin_so_level1(16).unwrap());
    v.push(builtin_so_level1(32).unwrap());
    let q = |p: i64, d: i64| Rational::new(p.into(), d.into());
    v.push(builtin_cyclic(1, &[q(0, 1)]).unwrap());
    v.push(builtin_cyclic(3, &[q(0, 1), q(1, 3), q(1, 3)]).unwrap());
    v
}

#[test]
fn ring_files_round_trip() {
    for ring in rings() {
        let text = RingFile::from_ring(&ring).to_json();
        let back = load_ring(&text).unwrap();
        assert_eq!(back, ring, "{}", ring.name());
        assert_eq!(RingFile::from_ring(&back).to_json(), text);
    }
}

#[test]
fn reports_round_trip() {
    for ring in rings() {
        let md = compute_modular_data(&ring).unwrap();
        let out = run(&md, &EnumerationOptions::default(), true, None).unwrap();
        assert!(out.complete);
        let text = out.report.to_json();
        let back = Report::from_json(&text).unwrap();
        assert_eq!(back, out.report);
        assert_eq!(back.to_json(), text);
        assert!(!back.to_markdown().is_empty());
    }
}

#[test]
fn single_targets_match_full_run() {
    let md = compute_modular_data(&builtin_su2(10)).unwrap();
    let opts = EnumerationOptions::default();
    let full = run(&md, &opts, true, None).unwrap().report;
    assert_eq!(full.classifications.len(), full.invariants.len());
    for (i, entry) in full.classifications.iter().enumerate() {
        let one = run(&md, &opts, true, Some(&Target::Index(i))).unwrap().report;
        assert_eq!(&one.classifications[0], entry);
        let m: Vec<Vec<i64>> = full.invariants[i].matrix.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
        let by_matrix = run(&md, &opts, true, Some(&Target::Matrix(m))).unwrap().report;
        assert_eq!(&by_matrix.classifications[0], entry);
    }
    assert!(run(&md, &opts, true, Some(&Target::Index(99))).is_err());
}

#[test]
fn matrix_files() {
    assert_eq!(parse_matrix("[[1,0],[0,1]]").unwrap(), vec![vec![1, 0], vec![0, 1]]);
    assert_eq!(parse_matrix("{\"matrix\": [[2]]}").unwrap(), vec![vec![2]]);
    assert!(parse_matrix("{\"rows\": [[2]]}").is_err());
}
