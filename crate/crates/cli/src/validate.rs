//! Built-in oracle and property suite behind the `validate` subcommand.
//! Prints one line per check and reports overall success.

use entrate::rng::{derive_seed, CounterRng};
use entrate::{
    alpha, beta_lambda_inverse, eta_estimator, expected_r_symmetric, first_mismatch_index,
    kmax_alpha_naive, kmax_alpha_trie, r_statistic, stationary_distribution, variance_bound,
    Alphabet, BernoulliSource, LambdaFamily, Source, SymbolSequence,
};

struct Suite {
    failures: usize,
    quick: bool,
}

impl Suite {
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        if pass {
            println!("ok    {name}");
        } else {
            println!("FAIL  {name}: {detail}");
            self.failures += 1;
        }
    }

    fn scale(&self, full: usize, quick: usize) -> usize {
        if self.quick {
            quick
        } else {
            full
        }
    }
}

/// Run every check; returns true when all pass.
pub fn run(quick: bool) -> bool {
    let mut suite = Suite { failures: 0, quick };

    lambda_constraints(&mut suite);
    bracket_and_symmetry(&mut suite);
    depth_monotonicity(&mut suite);
    trie_against_naive(&mut suite);
    beta_fixed_point(&mut suite);
    sampling_determinism(&mut suite);
    stationary_residual(&mut suite);
    closed_form_smoke(&mut suite);

    if suite.failures == 0 {
        println!("validate: all checks passed");
        true
    } else {
        println!("validate: {} check(s) failed", suite.failures);
        false
    }
}

fn families() -> Vec<LambdaFamily> {
    vec![
        LambdaFamily::zero(),
        LambdaFamily::beta(0.3).unwrap(),
        LambdaFamily::beta(0.5).unwrap(),
        LambdaFamily::beta(0.9).unwrap(),
        LambdaFamily::tabulated(vec![(0.0, 0.0), (1.0, 0.4), (3.0, 0.95)]).unwrap(),
    ]
}

fn lambda_constraints(suite: &mut Suite) {
    let grid = suite.scale(1000, 200);
    for f in families() {
        let name = format!("lambda constraints ({})", f.descriptor());
        let at_zero = f.eval(0.0).unwrap();
        if at_zero != 0.0 {
            suite.check(&name, false, format!("lambda(0) = {at_zero}"));
            continue;
        }
        let mut prev = 0.0;
        let mut bad = None;
        for i in 0..=grid {
            let t = i as f64 * 10.0 / grid as f64;
            let v = f.eval(t).unwrap();
            if !(0.0..=1.0).contains(&v) || v < prev {
                bad = Some(format!("lambda({t}) = {v}, previous {prev}"));
                break;
            }
            prev = v;
        }
        suite.check(&name, bad.is_none(), bad.unwrap_or_default());
    }
}

fn bracket_and_symmetry(suite: &mut Suite) {
    let pairs = suite.scale(10_000, 1000);
    let mut rng = CounterRng::new(101);
    let alphabet = Alphabet::new(4).unwrap();
    let fams = families();
    let mut bad = None;
    'outer: for _ in 0..pairs {
        let m = 1 + rng.next_below(32) as usize;
        let asize = 2 + rng.next_below(3);
        let xs: Vec<u32> = (0..m).map(|_| rng.next_below(asize) as u32).collect();
        let ys: Vec<u32> = (0..m).map(|_| rng.next_below(asize) as u32).collect();
        let x = SymbolSequence::new(xs, &alphabet).unwrap();
        let y = SymbolSequence::new(ys, &alphabet).unwrap();
        let p = first_mismatch_index(&x, &y).unwrap() as f64;
        for f in &fams {
            let a = alpha(&x, &y, f).unwrap();
            if alpha(&y, &x, f).unwrap() != a || a < p - 1.0 || a > p {
                bad = Some(format!("p = {p}, alpha = {a} ({})", f.descriptor()));
                break 'outer;
            }
        }
    }
    suite.check(
        &format!("bi-Lipschitz bracket + symmetry ({pairs} pairs)"),
        bad.is_none(),
        bad.unwrap_or_default(),
    );
}

fn depth_monotonicity(suite: &mut Suite) {
    let pairs = suite.scale(2000, 300);
    let mut rng = CounterRng::new(202);
    let alphabet = Alphabet::new(3).unwrap();
    let mut bad = None;
    'outer: for _ in 0..pairs {
        let m = 2 + rng.next_below(24) as usize;
        let xs: Vec<u32> = (0..m).map(|_| rng.next_below(3) as u32).collect();
        let ys: Vec<u32> = (0..m).map(|_| rng.next_below(3) as u32).collect();
        for f in families() {
            let x_short = SymbolSequence::new(xs[..m - 1].to_vec(), &alphabet).unwrap();
            let y_short = SymbolSequence::new(ys[..m - 1].to_vec(), &alphabet).unwrap();
            let x = SymbolSequence::new(xs.clone(), &alphabet).unwrap();
            let y = SymbolSequence::new(ys.clone(), &alphabet).unwrap();
            let short = alpha(&x_short, &y_short, &f).unwrap();
            let long = alpha(&x, &y, &f).unwrap();
            if long < short {
                bad = Some(format!(
                    "alpha dropped from {short} to {long} ({})",
                    f.descriptor()
                ));
                break 'outer;
            }
        }
    }
    suite.check(
        "alpha nondecreasing in truncation depth",
        bad.is_none(),
        bad.unwrap_or_default(),
    );
}

fn trie_against_naive(suite: &mut Suite) {
    let rounds = suite.scale(30, 8);
    let mut rng = CounterRng::new(303);
    let fams = families();
    let mut bad = None;
    'outer: for round in 0..rounds {
        let asize = 2 + rng.next_below(3) as usize;
        let np = 4 + rng.next_below(60) as usize;
        let m = 4 + rng.next_below(32) as usize;
        let src = Source::Bernoulli(BernoulliSource::uniform(asize).unwrap());
        let sample = src.sample(np, m, rng.next_u64()).unwrap();
        let kmax = 1 + rng.next_below((np - 1).min(5) as u64) as usize;
        let orders: Vec<usize> = (1..=kmax).collect();
        let family = &fams[round % fams.len()];
        let trie = kmax_alpha_trie(&sample, &orders, family).unwrap();
        for j in 0..np {
            let naive = kmax_alpha_naive(&sample, j, &orders, family).unwrap();
            if trie.per_point()[j] != naive {
                bad = Some(format!(
                    "round {round}, point {j}, family {}",
                    family.descriptor()
                ));
                break 'outer;
            }
        }
    }
    suite.check(
        &format!("trie matches naive oracle ({rounds} samples)"),
        bad.is_none(),
        bad.unwrap_or_default(),
    );
}

fn beta_fixed_point(suite: &mut Suite) {
    let beta = 0.5f64;
    let ball = |t: f64| beta.powf(t).min(1.0);
    let mut worst = 0.0f64;
    for i in 1..=100 {
        let t = i as f64 * 0.1;
        let lhs = beta * ball(t - 1.0) + (1.0 - beta) * ball(beta_lambda_inverse(beta, t));
        worst = worst.max((lhs - ball(t)).abs());
    }
    suite.check(
        "beta-family fixed point",
        worst <= 1e-10,
        format!("worst residual {worst:e}"),
    );
}

fn sampling_determinism(suite: &mut Suite) {
    let src = Source::Bernoulli(BernoulliSource::new(vec![0.2, 0.3, 0.5]).unwrap());
    let a = src.sample(16, 32, 999).unwrap();
    let b = src.sample(16, 32, 999).unwrap();
    let grown = src.sample(24, 32, 999).unwrap();
    let identical = (0..16).all(|j| a.point(j) == b.point(j));
    let prefix_stable = (0..16).all(|j| a.point(j) == grown.point(j));
    suite.check(
        "sampling determinism + sub-seed stability",
        identical && prefix_stable,
        format!("identical={identical} prefix_stable={prefix_stable}"),
    );
}

fn stationary_residual(suite: &mut Suite) {
    let chains: Vec<Vec<Vec<f64>>> = vec![
        vec![vec![0.9, 0.1], vec![0.5, 0.5]],
        vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        vec![
            vec![0.2, 0.5, 0.3],
            vec![0.4, 0.1, 0.5],
            vec![0.25, 0.25, 0.5],
        ],
    ];
    let mut worst = 0.0f64;
    for chain in &chains {
        let pi = match stationary_distribution(chain) {
            Ok(pi) => pi,
            Err(e) => {
                suite.check("stationary distribution residual", false, e.to_string());
                return;
            }
        };
        let size = chain.len();
        for j in 0..size {
            let pj: f64 = (0..size).map(|i| pi[i] * chain[i][j]).sum();
            worst = worst.max((pj - pi[j]).abs());
        }
    }
    suite.check(
        "stationary distribution residual",
        worst <= 1e-10,
        format!("worst residual {worst:e}"),
    );
}

fn closed_form_smoke(suite: &mut Suite) {
    let trials = suite.scale(40, 15);
    let np = 64;
    let m = 48;
    let k = 1;
    let src = Source::Bernoulli(BernoulliSource::uniform(2).unwrap());
    let family = LambdaFamily::beta(0.5).unwrap();
    let mut rs = Vec::with_capacity(trials);
    let mut etas = Vec::with_capacity(trials);
    for t in 0..trials {
        let sample = src.sample(np, m, derive_seed(424_242, t as u64)).unwrap();
        rs.push(r_statistic(&sample, k, &family).unwrap());
        etas.push(eta_estimator(&sample, k, &family).unwrap().eta);
    }
    let tn = trials as f64;
    let mean_r = rs.iter().sum::<f64>() / tn;
    let var_r = rs.iter().map(|v| (v - mean_r) * (v - mean_r)).sum::<f64>() / (tn - 1.0);
    let mean_eta = etas.iter().sum::<f64>() / tn;
    let var_eta = etas.iter().map(|v| (v - mean_eta) * (v - mean_eta)).sum::<f64>() / (tn - 1.0);

    let expected = expected_r_symmetric(np, k, 2).unwrap();
    let r_ok = (mean_r - expected).abs() <= 3.0 * (var_r / tn).sqrt();
    let inverse_h = 1.0 / 2f64.ln();
    let eta_ok = (mean_eta - inverse_h).abs() <= 3.0 * (var_eta / tn).sqrt();
    let bound_ok = var_r <= variance_bound(np, k, m);
    suite.check(
        &format!("closed-form Monte Carlo smoke ({trials} trials)"),
        r_ok && eta_ok && bound_ok,
        format!(
            "mean_r={mean_r} expected={expected} mean_eta={mean_eta} 1/h={inverse_h} \
             var_r={var_r} bound_ok={bound_ok}"
        ),
    );
}
