//! Acceptance run: one PASS/FAIL line per criterion; exits nonzero if any
//! criterion fails.

use std::time::{Duration, Instant};

use alphaleak::experiments::*;
use alphaleak_core::capacity::{
    conditional_maximal_alpha_leakage, maximal_alpha_leakage, sup_equality_check, SibsonObjective,
};
use alphaleak_core::prob::index_labels;
use alphaleak_core::{AlphaOrder, Channel, LogBase, Pmf, SolverOptions};
use rand::Rng;
use rayon::prelude::*;

const BITS: LogBase = LogBase::Bits;

fn a(v: f64) -> AlphaOrder {
    AlphaOrder::new(v).unwrap()
}

fn h2(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Independent closed form of the BSC leakage, bits.
fn bsc_bits(p: f64, al: AlphaOrder) -> f64 {
    match al {
        AlphaOrder::One => 1.0 - h2(p),
        AlphaOrder::Infinity => (2.0 * (1.0 - p)).log2(),
        AlphaOrder::Finite(x) => 1.0 + (p.powf(x) + (1.0 - p).powf(x)).log2() / (x - 1.0),
    }
}

fn leak(px: &Pmf, ch: &Channel, al: AlphaOrder) -> f64 {
    maximal_alpha_leakage(px, ch, al, BITS, &SolverOptions::default())
        .unwrap()
        .value
        .value
}

type Check = Result<String, String>;

fn criterion1() -> Check {
    let start = Instant::now();
    let grid = [
        AlphaOrder::One,
        a(1.5),
        a(2.0),
        a(5.0),
        a(20.0),
        AlphaOrder::Infinity,
    ];
    let px = Pmf::uniform(&index_labels(2)).unwrap();
    let mut worst: f64 = 0.0;
    for p in [0.1, 0.25, 0.4] {
        let ch = Channel::binary_symmetric(p).unwrap();
        for &al in &grid {
            worst = worst.max((leak(&px, &ch, al) - bsc_bits(p, al)).abs());
        }
    }
    let t = start.elapsed();
    if worst <= 1e-6 && t < Duration::from_secs(5) {
        Ok(format!(
            "max |solver - closed form| = {worst:.1e} bits in {t:.2?}"
        ))
    } else {
        Err(format!("max diff {worst:e} bits, runtime {t:?}"))
    }
}

fn criterion2() -> Check {
    let opts = SolverOptions::default();
    let p = 0.25;
    let mut worst_value: f64 = 0.0;
    let mut worst_one: f64 = 0.0;
    for q in [0.0, 0.25, 0.5] {
        let j = bsc_markov_joint(p, q).unwrap();
        let (px, ch) = j.xy_marginal().decompose();
        for al in [
            AlphaOrder::One,
            a(1.5),
            a(2.0),
            a(5.0),
            AlphaOrder::Infinity,
        ] {
            let cond = conditional_maximal_alpha_leakage(&j, al, BITS, &opts)
                .unwrap()
                .value
                .value;
            let plain = leak(&px, &ch, al);
            if q == 0.0 {
                worst_value = worst_value.max(cond.abs());
            } else if al == AlphaOrder::One {
                let r = p + q - 2.0 * p * q;
                worst_one = worst_one.max((cond - (h2(r) - h2(p))).abs());
            } else {
                worst_value = worst_value.max((cond - bsc_bits(p, al)).abs());
            }
            let equal = (cond - plain).abs() <= 1e-7;
            // q = 0 reveals X through Z: the conditional leakage is 0
            let expected = (al != AlphaOrder::One && q != 0.0) || q == 0.5;
            if equal != expected {
                return Err(format!(
                    "q={q}, alpha={al}: cond {cond}, uncond {plain}, equal={equal}"
                ));
            }
        }
    }
    if worst_value <= 1e-6 && worst_one <= 1e-9 {
        Ok(format!("value error {worst_value:.1e}, alpha=1 error {worst_one:.1e}; equality pattern matches"))
    } else {
        Err(format!(
            "value error {worst_value:e}, alpha=1 error {worst_one:e}"
        ))
    }
}

fn criterion3() -> Check {
    let opts = SolverOptions::default();
    let mut min_margin = f64::INFINITY;
    for p in [0.1, 0.25, 0.4] {
        let j = xor_side_information_joint(p).unwrap();
        for al in [
            AlphaOrder::One,
            a(1.5),
            a(2.0),
            a(5.0),
            a(20.0),
            AlphaOrder::Infinity,
        ] {
            let cond = conditional_maximal_alpha_leakage(&j, al, BITS, &opts)
                .unwrap()
                .value
                .value;
            if (cond - 1.0).abs() > 1e-12 {
                return Err(format!("p={p}, alpha={al}: conditional {cond} != 1 bit"));
            }
            min_margin = min_margin.min(cond - bsc_bits(p, al));
        }
    }
    if min_margin > 0.0 {
        Ok(format!(
            "conditional = 1 bit; smallest excess over unconditional {min_margin:.4} bits"
        ))
    } else {
        Err(format!("smallest excess {min_margin}"))
    }
}

fn alphas() -> Vec<AlphaOrder> {
    vec![
        AlphaOrder::One,
        a(1.5),
        a(2.0),
        a(5.0),
        AlphaOrder::Infinity,
    ]
}

fn report_line(r: &TrialReport) -> String {
    format!(
        "{} records, {} violations, {} failures, max |diff| {:.1e}",
        r.records().len(),
        r.violations,
        r.failures,
        r.max_difference.unwrap_or(f64::NAN)
    )
}

fn criterion4() -> Check {
    let mut lines = Vec::new();
    for (sizes, seed) in [((2, 2, 2), 41), ((3, 3, 3), 42)] {
        let r = verify_thm1(&TrialConfig::new(sizes, alphas(), 500, seed).with_tol(1e-9)).unwrap();
        if !r.passed() {
            return Err(format!("{sizes:?}: {}", report_line(&r)));
        }
        lines.push(format!(
            "{}x{}x{}: {}",
            sizes.0,
            sizes.1,
            sizes.2,
            report_line(&r)
        ));
    }
    Ok(lines.join("; "))
}

fn criterion5() -> Check {
    let r =
        verify_robustness_theorem(&TrialConfig::new((2, 2, 2), alphas(), 1000, 7).with_tol(1e-7))
            .unwrap();
    if r.passed() {
        Ok(report_line(&r))
    } else {
        Err(report_line(&r))
    }
}

fn criterion6() -> Check {
    let start = Instant::now();
    let al = a(2.0);
    let j = bsc_markov_joint(0.25, 0.25).unwrap();
    let cap = conditional_maximal_alpha_leakage(&j, al, BITS, &SolverOptions::default())
        .unwrap()
        .value
        .value;
    let uniform = Pmf::uniform(&index_labels(2)).unwrap();
    let bounds = witness_sweep(&j, al, Some(&uniform), &[100, 10_000, 1_000_000], 1, BITS).unwrap();
    let v: Vec<f64> = bounds.iter().map(|b| b.value.value).collect();
    for b in &bounds {
        if let Some(d) = b.direct {
            if (d - b.value.value).abs() > 1e-8 {
                return Err(format!("closed form {} vs direct {d}", b.value.value));
            }
        }
    }
    let monotone = v.windows(2).all(|w| w[0] <= w[1]);
    let below = v.iter().all(|&x| x <= cap + SolverOptions::default().tol);
    let close = cap - v[2] <= 1e-2;
    let msg = format!(
        "bounds {:.6} / {:.6} / {:.6} vs capacity {cap:.6} bits (gap {:.1e}) in {:.2?}",
        v[0],
        v[1],
        v[2],
        cap - v[2],
        start.elapsed()
    );
    if monotone && below && close {
        Ok(msg)
    } else {
        Err(format!(
            "{msg}; monotone={monotone} below={below} close={close}"
        ))
    }
}

fn criterion7() -> Check {
    // (solver vs oracle, Sibson vs Arimoto suprema) per channel
    let diffs: Vec<(f64, f64)> = (0..100usize)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(77, k);
            let nx = if k % 2 == 0 { 2 } else { 3 };
            let ny = rng.gen_range(2..=3);
            let ch = random_channel(&mut rng, nx, ny).unwrap();
            let px = Pmf::uniform(ch.input_labels()).unwrap();
            let mut worst = (0.0f64, 0.0f64);
            for al in [a(1.2), a(2.0), a(5.0)] {
                let rep = sup_equality_check(ch.input_labels(), &ch, al, BITS, 400).unwrap();
                worst.0 = worst.0.max((leak(&px, &ch, al) - rep.sibson_max).abs());
                worst.1 = worst.1.max(rep.difference.abs());
            }
            worst
        })
        .collect();
    let worst_oracle = diffs.iter().map(|d| d.0).fold(0.0, f64::max);
    let worst_sup = diffs.iter().map(|d| d.1).fold(0.0, f64::max);
    if worst_oracle <= 5e-3 && worst_sup <= 1e-3 {
        Ok(format!("solver vs oracle {worst_oracle:.1e} bits; Sibson vs Arimoto suprema {worst_sup:.1e} bits"))
    } else {
        Err(format!(
            "solver vs oracle {worst_oracle:e}; suprema {worst_sup:e}"
        ))
    }
}

fn criterion8() -> Check {
    let mut rng = trial_rng(88, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let nx = rng.gen_range(2..=4);
        let ny = rng.gen_range(2..=4);
        let ch = random_channel(&mut rng, nx, ny).unwrap();
        let al = 1.1 + 8.9 * rng.gen::<f64>();
        let obj = SibsonObjective::new(&ch, al).unwrap();
        let p = random_simplex(&mut rng, nx);
        let g = obj.gradient(&p);
        let h = 1e-6;
        for x in 0..nx {
            let (mut up, mut dn) = (p.clone(), p.clone());
            up[x] += h;
            dn[x] -= h;
            let fd = (obj.value(&up) - obj.value(&dn)) / (2.0 * h);
            worst = worst.max((g[x] - fd).abs() / g[x].abs().max(1e-12));
        }
    }
    if worst <= 1e-5 {
        Ok(format!("max relative error {worst:.1e} over 50 points"))
    } else {
        Err(format!("max relative error {worst:e}"))
    }
}

fn criterion9() -> Check {
    let cfg = TrialConfig::new(
        (3, 3, 3),
        vec![
            a(0.5),
            AlphaOrder::One,
            a(2.0),
            a(5.0),
            AlphaOrder::Infinity,
        ],
        1000,
        9,
    )
    .with_tol(1e-9);
    let r = verify_sibson_dpi(&cfg).unwrap();
    if r.passed() {
        Ok(report_line(&r))
    } else {
        Err(report_line(&r))
    }
}

fn criterion10() -> Check {
    let cfg = TrialConfig::new(
        (2, 2, 2),
        vec![AlphaOrder::One, a(2.0), AlphaOrder::Infinity],
        1000,
        10,
    );
    let first = verify_composition_conjecture(&cfg).unwrap();
    let second = verify_composition_conjecture(&cfg).unwrap();
    let json = serde_json::to_string(&first).unwrap();
    if first != second || json != serde_json::to_string(&second).unwrap() {
        return Err("reports differ between runs with the same seed".into());
    }
    if !first.experimental || first.records().len() != 3000 || first.failures != 0 {
        return Err(format!("unexpected report: {}", report_line(&first)));
    }
    Ok(format!(
        "experimental report reproduced from seed {}: {} violations, max violation {:.1e} bits",
        cfg.seed, first.violations, first.max_violation
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("BSC closed form", criterion1),
        ("side-information example, Markov", criterion2),
        ("side-information counterexample", criterion3),
        ("operational definition equivalence", criterion4),
        ("robustness under Markov side information", criterion5),
        ("constructive lower bound", criterion6),
        ("grid oracle equivalence", criterion7),
        ("gradient check", criterion8),
        ("Sibson data processing", criterion9),
        ("composition conjecture experiment", criterion10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} [{t:.2?}]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} [{t:.2?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
