use expzero::exppoly::ExpPoly;
use expzero::parser::{parse, VarPolicy};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOKENS: &[&str] = &[
    "x", "x1", "x2", "x10", "y", "exp", "log", "log[1]", "root", "i", "(", ")", "(", ")", "+", "-", "*", "/", "^", "2",
    "1/2", "0", "17", ",", " ", "\n", "[", "]", "@", "é",
];

fn check(input: &str) {
    match parse(input, &VarPolicy::Auto) {
        Ok(_) => {}
        Err(e) => {
            assert!(e.span.start <= e.span.end && e.span.end <= input.len(), "{:?} for {:?}", e.span, input);
            assert!(e.line >= 1 && e.column >= 1);
            assert!(!e.message.is_empty());
        }
    }
    // normalization is total as well: a value or a single error
    let _ = ExpPoly::parse(input);
}

#[test]
fn ten_thousand_token_soups() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf022);
    for _ in 0..10_000 {
        let len = rng.gen_range(0..24);
        let s: String = (0..len).map(|_| *TOKENS.choose(&mut rng).unwrap()).collect();
        check(&s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn arbitrary_strings_never_panic(s in "\\PC{0,40}") {
        check(&s);
    }

    #[test]
    fn deep_nesting_is_bounded(depth in 0usize..600) {
        let s = format!("{}x{}", "(".repeat(depth), ")".repeat(depth));
        check(&s);
    }
}

#[test]
fn deep_exponential_towers() {
    for depth in [1usize, 10, 64] {
        let s = format!("{}x{}", "exp(".repeat(depth), ")".repeat(depth));
        let p = ExpPoly::parse(&s).unwrap();
        assert_eq!(p.height() as usize, depth);
        assert_eq!(ExpPoly::parse(&p.to_string()).unwrap(), p);
    }
    for depth in [65usize, 300, 5000] {
        let s = format!("{}x{}", "exp(".repeat(depth), ")".repeat(depth));
        let e = parse(&s, &VarPolicy::Auto).unwrap_err();
        assert!(e.message.contains("nested deeper"), "{}", e.message);
    }
}

#[test]
fn long_flat_chains() {
    let n = 20_000;
    let sum = vec!["x"; n].join(" + ");
    assert_eq!(ExpPoly::parse(&sum).unwrap().to_string(), format!("{}*x", n));
    let alternating: String = (0..n).map(|k| if k % 2 == 0 { " + x" } else { " - x" }).collect();
    assert!(ExpPoly::parse(&format!("1{}", alternating)).unwrap().to_string() == "1");
    let product = vec!["x"; 200].join("*");
    assert_eq!(ExpPoly::parse(&product).unwrap().to_string(), "x^200");
    let minus = "-".repeat(n) + "x";
    assert!(parse(&minus, &VarPolicy::Auto).is_err());
    let signs = ExpPoly::parse("x1 - x2 - x3 + x4 - x5 + x6 - x7").unwrap();
    assert_eq!(signs, ExpPoly::parse("x1 + x4 + x6 - (x2 + x3 + x5 + x7)").unwrap());
}
