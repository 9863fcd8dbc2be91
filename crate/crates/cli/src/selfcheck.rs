use hadalg::algebra::Element;
use hadalg::error::Error;
use hadalg::{EpSeq, Weight, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::{Outcome, Output, EXIT_NUMERIC, EXIT_OK};

/// Small dyadic values keep sums and products exact in binary floating point.
fn dyadic(rng: &mut ChaCha8Rng) -> C64 {
    let v = |rng: &mut ChaCha8Rng| rng.random_range(-8i32..=8) as f64 / 4.0;
    C64::new(v(rng), v(rng))
}

fn random_element(rng: &mut ChaCha8Rng, w: &Weight) -> Result<Element, Error> {
    let p = rng.random_range(0..=3);
    let c = rng.random_range(1..=4);
    let prefix = (0..p).map(|_| dyadic(rng)).collect();
    let cycle = (0..c).map(|_| dyadic(rng)).collect();
    Ok(Element::from_normalized(w.clone(), EpSeq::new(prefix, cycle)?))
}

/// Ring laws, submultiplicativity and the division criterion on `cases`
/// random triples.
pub fn run(seed: u64, cases: usize) -> Result<Outcome, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = Weight::factorial();
    let mut failures = Vec::new();
    for case in 0..cases {
        let f = random_element(&mut rng, &w)?;
        let g = random_element(&mut rng, &w)?;
        let h = random_element(&mut rng, &w)?;
        let checks = [
            ("associativity", f.star(&g)?.star(&h)? == f.star(&g.star(&h)?)?),
            ("commutativity", f.star(&g)? == g.star(&f)?),
            ("distributivity", f.star(&g.add(&h)?)? == f.star(&g)?.add(&f.star(&h)?)?),
            // moduli are rounded square roots, so allow a few ulps
            ("submultiplicative", f.star(&g)?.norm().value <= f.norm().value * g.norm().value * (1.0 + 4.0 * f64::EPSILON)),
            ("unit", f.star(&Element::unit(w.clone()))? == f),
            (
                "division",
                match f.star(&g)?.divide(&g) {
                    Ok(q) => q.quotient.star(&g)?.sub(&f.star(&g)?)?.norm().value <= 1e-12,
                    Err(_) => false,
                },
            ),
        ];
        failures.extend(checks.iter().filter(|(_, ok)| !ok).map(|(name, _)| json!({ "case": case, "check": name })));
    }
    let pass = failures.is_empty();
    Ok(Outcome {
        code: if pass { EXIT_OK } else { EXIT_NUMERIC },
        output: Output::Doc(json!({ "seed": seed, "cases": cases, "pass": pass, "failures": failures })),
        summary: format!("selfcheck seed {seed}: {cases} cases, {}", if pass { "all pass" } else { "FAILURES" }),
    })
}
