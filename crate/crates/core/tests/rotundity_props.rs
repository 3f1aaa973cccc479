use expzero::corpus::{generate, CorpusSpec};
use expzero::reduction::{free_or_poly_loop, Outcome};
use expzero::rotundity::{rotundity_probe, ProbeConfig};

#[test]
fn ranks_never_exceed_the_variety_dimension() {
    let corpus = generate(&CorpusSpec { size: 18, seed: 0x0b5e, ..CorpusSpec::default() });
    let cfg = ProbeConfig { trials: 6, samples: 3, ..ProbeConfig::default() };
    let mut probed = 0;
    for p in &corpus {
        let Outcome::FreeSystem(v) = free_or_poly_loop(p).unwrap().outcome else { continue };
        let report = rotundity_probe(&v, &cfg).unwrap();
        let dim = v.alpha() + v.n() - 1;
        assert_eq!(report.expected_dimension, dim);
        let id = report.identity_rank.expect("identity rank");
        assert!(id <= dim, "{}: identity rank {} > {}", p, id, dim);
        for rec in &report.records {
            if let Some(rank) = rec.rank {
                // the map has an additive and a multiplicative block of r rows each
                assert!(rank <= (2 * rec.r).min(dim), "{}: rank {} with r = {}", p, rank, rec.r);
                assert_eq!(rec.pass, rank >= rec.r);
            }
        }
        probed += 1;
    }
    assert!(probed >= 3, "only {} free systems in the sample", probed);
}

#[test]
fn reports_are_reproducible() {
    let p = expzero::exppoly::ExpPoly::parse("exp(exp(x1/2 + x2^2)) + x1^3").unwrap();
    let Outcome::FreeSystem(v) = free_or_poly_loop(&p).unwrap().outcome else { panic!("not free") };
    let cfg = ProbeConfig { trials: 8, seed: 42, ..ProbeConfig::default() };
    let a = rotundity_probe(&v, &cfg).unwrap();
    assert_eq!(a, rotundity_probe(&v, &cfg).unwrap());
    assert!(a.pass);
}
