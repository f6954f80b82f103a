//! End-to-end acceptance checks over the shipped scenarios.
//!
//! Each check returns an [`Outcome`] with a verdict and the measured
//! numbers; [`CHECKS`] lists them in order. Scenario reports shared between
//! checks are computed once per [`Runs`].

use std::cell::OnceCell;
use std::path::{Path, PathBuf};
use std::time::Instant;

use precursor_cli::{run_config, simulate, RunOptions, ScenarioConfig};
use precursor_core::fock::{oracle_fidelity, validation_pairs, FockConfig};
use precursor_core::linalg::{CMatrix, C};
use precursor_core::metrics::{gaussian_fidelity, uhlmann_fidelity};
use precursor_core::{BoundReport, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

pub fn load(name: &str) -> ScenarioConfig {
    ScenarioConfig::from_path(&scenario_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn report(cfg: &ScenarioConfig) -> BoundReport {
    simulate(cfg).unwrap_or_else(|e| panic!("simulation failed: {e}"))
}

/// Scenario reports shared between checks, computed on first use.
#[derive(Default)]
pub struct Runs {
    dv_baseline: OnceCell<BoundReport>,
    cv_baseline: OnceCell<BoundReport>,
    dv_exact: OnceCell<BoundReport>,
    cv_exact: OnceCell<BoundReport>,
}

impl Runs {
    fn dv_baseline(&self) -> &BoundReport {
        self.dv_baseline.get_or_init(|| report(&load("dv_baseline.toml")))
    }
    fn cv_baseline(&self) -> &BoundReport {
        self.cv_baseline.get_or_init(|| report(&load("cv_baseline.toml")))
    }
    fn dv_exact(&self) -> &BoundReport {
        self.dv_exact.get_or_init(|| report(&load("dv_exact.toml")))
    }
    fn cv_exact(&self) -> &BoundReport {
        self.cv_exact.get_or_init(|| report(&load("cv_exact.toml")))
    }
}

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Largest `lhs(s, t) − Σ terms(s, 0)` over the grid.
fn bound_slack(r: &BoundReport) -> f64 {
    r.lhs
        .entries()
        .map(|(s, _, v)| v - r.rhs_at(s, 0).expect("level 0 evaluated").sum())
        .fold(f64::NEG_INFINITY, f64::max)
}

fn exact_bound(runs: &Runs) -> Outcome {
    let dv = bound_slack(runs.dv_exact());
    let cv = bound_slack(runs.cv_exact());
    let exact = runs.dv_exact().mode.label() == "exact" && runs.cv_exact().mode.label() == "exact";
    Outcome::new(
        exact && dv <= 1e-9 && cv <= 1e-9,
        format!("max lhs - rhs(k=0): dv 8 steps {dv:.3e}, cv 100 steps {cv:.3e}"),
    )
}

/// Worst increase of any term along the listed levels, and the largest term
/// left at the top level (which must be exactly zero).
fn hierarchy_stats(r: &BoundReport, capacity: usize) -> (f64, f64, bool) {
    let mut worst_rise = f64::NEG_INFINITY;
    let mut top = 0.0_f64;
    let top_listed = r.levels.last() == Some(&capacity);
    for s in 0..r.lhs.steps() {
        let terms: Vec<[f64; 3]> =
            r.levels.iter().map(|&k| r.rhs_at(s, k).map(|t| [t.env, t.corr1, t.corr2]).unwrap()).collect();
        for pair in terms.windows(2) {
            worst_rise = pair[0].iter().zip(&pair[1]).fold(worst_rise, |w, (lo, hi)| w.max(hi - lo));
        }
        if let Some(last) = terms.last() {
            top = top.max(last.iter().fold(0.0, |a, &b| a.max(b.abs())));
        }
    }
    (worst_rise, top, top_listed)
}

fn hierarchy(runs: &Runs) -> Outcome {
    let cases = [
        ("dv", runs.dv_baseline(), 4),
        ("cv", runs.cv_baseline(), 121),
        ("dv exact", runs.dv_exact(), 9),
        ("cv exact", runs.cv_exact(), 101),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, r, cap) in cases {
        let (rise, top, listed) = hierarchy_stats(r, cap);
        pass &= listed && rise <= 1e-10 && top == 0.0;
        parts.push(format!("{name}: max rise {rise:.1e}, k={cap} max {top:e}"));
    }
    Outcome::new(pass, parts.join("; "))
}

fn stationary_branch(runs: &Runs) -> Outcome {
    let worst = |r: &BoundReport| r.rhs.iter().map(|row| row.terms.corr2).fold(0.0, f64::max);
    let (dv, cv) = (worst(runs.dv_baseline()), worst(runs.cv_baseline()));
    Outcome::new(dv < 1e-12 && cv < 1e-12, format!("max corr2: dv {dv:e}, cv {cv:e}"))
}

fn no_initial_revivals(runs: &Runs) -> Outcome {
    let worst = |r: &BoundReport| (1..=r.lhs.steps()).map(|t| r.lhs.value(0, t)).fold(f64::NEG_INFINITY, f64::max);
    let (dv, cv) = (worst(runs.dv_baseline()), worst(runs.cv_baseline()));
    Outcome::new(dv <= 1e-12 && cv <= 1e-12, format!("max lhs(0, t): dv {dv:.3e}, cv {cv:.3e}"))
}

fn markovian_limit(_: &Runs) -> Outcome {
    let cfg = load("dv_markovian.toml");
    let r = report(&cfg);
    let count = r.revivals.count();
    Outcome::new(
        cfg.theta_aa == 0.0 && cfg.revival_eps == 1e-9 && count == 0,
        format!("{count} revivals over {} steps", cfg.steps),
    )
}

fn cv_sign_pattern(runs: &Runs) -> Outcome {
    let r = runs.cv_baseline();
    let n = r.lhs.steps();
    let failing = |s: usize| (s + 1..=n).filter(|&t| !r.revivals.mask[s][t]).collect::<Vec<_>>();
    let mut pass = n == 120;
    let mut parts = Vec::new();
    for s in [20, 60, 100] {
        let gaps = failing(s);
        pass &= gaps.is_empty();
        parts.push(format!("s={s}: {} of {} t without revival {:?}", gaps.len(), n - s, &gaps[..gaps.len().min(4)]));
    }
    for s in [0, 40, 80] {
        let hits = (s + 1..=n).filter(|&t| r.revivals.mask[s][t]).count();
        pass &= hits == 0;
        parts.push(format!("s={s}: {hits} revivals"));
    }
    let all_positive: Vec<usize> = (0..n).filter(|&s| failing(s).is_empty()).collect();
    parts.push(format!("rows revival-positive for every t: {all_positive:?}"));
    Outcome::new(pass, parts.join("; "))
}

fn erasure(_: &Runs) -> Outcome {
    let cv = report(&load("cv_erasure.toml")).revivals.count();
    let plus_cfg = load("dv_erasure.toml");
    let plus = report(&plus_cfg).revivals.count();
    let incoherent: Vec<usize> = [0.0, 1.0]
        .into_iter()
        .map(|alpha| {
            let mut cfg = plus_cfg.clone();
            cfg.dv.as_mut().unwrap().alpha1 = alpha;
            report(&cfg).revivals.count()
        })
        .collect();
    let is_plus = (plus_cfg.dv.as_ref().unwrap().alpha1 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15;
    Outcome::new(
        is_plus && plus_cfg.erase_correlations && cv == 0 && plus >= 1 && incoherent.iter().all(|&c| c == 0),
        format!("cv {cv} revivals; dv |+> {plus}; dv alpha=0 {}, alpha=1 {}", incoherent[0], incoherent[1]),
    )
}

fn random_density(rng: &mut ChaCha8Rng, rank: usize) -> CMatrix<f64> {
    let vecs: Vec<[C<f64>; 2]> = (0..rank)
        .map(|_| [(); 2].map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    let m = CMatrix::from_fn(2, |i, j| vecs.iter().map(|v| v[i] * v[j].conj()).sum());
    let tr = m.trace().re;
    m.scale_real(1.0 / tr).hermitize()
}

/// `F = √(tr ρσ + 2√(det ρ det σ))` for qubits. The determinant of a
/// rank-one input is zero by construction; its rounded value is not.
fn qubit_fidelity((a, rank_a): (&CMatrix<f64>, usize), (b, rank_b): (&CMatrix<f64>, usize)) -> f64 {
    let det = |m: &CMatrix<f64>, rank: usize| {
        if rank < 2 {
            0.0
        } else {
            (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.max(0.0)
        }
    };
    ((a * b).trace().re + 2.0 * (det(a, rank_a) * det(b, rank_b)).sqrt()).sqrt()
}

fn oracle_agreement(_: &Runs) -> Outcome {
    let start = Instant::now();
    let cfg = FockConfig { cutoff: 60, ..FockConfig::default() };
    let pairs = validation_pairs();
    let mut gaussian_worst = 0.0_f64;
    let mut errors = 0;
    for (p1, p2) in &pairs {
        let closed = p1.gaussian().and_then(|a| gaussian_fidelity(&a, &p2.gaussian()?));
        match (closed, oracle_fidelity(p1, p2, &cfg)) {
            (Ok(f), Ok(g)) => gaussian_worst = gaussian_worst.max((f - g).abs()),
            _ => errors += 1,
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut qubit_worst = 0.0_f64;
    for i in 0..1000 {
        let (rank_a, rank_b) = (1 + i % 2, 1 + (i / 2) % 2);
        let (a, b) = (random_density(&mut rng, rank_a), random_density(&mut rng, rank_b));
        match uhlmann_fidelity(&a, &b) {
            Ok(f) => qubit_worst = qubit_worst.max((f - qubit_fidelity((&a, rank_a), (&b, rank_b))).abs()),
            Err(_) => errors += 1,
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(
        pairs.len() == 30 && errors == 0 && gaussian_worst <= 1e-6 && qubit_worst <= 1e-12 && secs < 60.0,
        format!(
            "{} gaussian pairs at cutoff 60: max |dF| {gaussian_worst:.2e}; 1000 qubit pairs: max |dF| {qubit_worst:.2e}; {errors} errors; {secs:.1} s",
            pairs.len()
        ),
    )
}

fn information_conservation(_: &Runs) -> Outcome {
    let cfg = load("dv_info.toml");
    let r = report(&cfg);
    let Some(info) = r.info else {
        return Outcome::new(false, "no information decomposition produced");
    };
    let total: Vec<f64> = info.i_int.iter().zip(&info.i_ext).map(|(a, b)| a + b).collect();
    let drift = total.iter().map(|x| (x - total[0]).abs()).fold(0.0, f64::max);
    let off_one = info.i_tot.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
    Outcome::new(
        cfg.steps == 6 && cfg.window == Window::Full && drift <= 1e-9 && off_one <= 1e-9,
        format!("{} snapshots: max drift of i_int + i_ext {drift:.2e}, max |i_tot - 1| {off_one:.2e}", total.len()),
    )
}

fn steady_traces(runs: &Runs) -> Outcome {
    let cv: Vec<f64> = runs.cv_baseline().steady.iter().map(|p| p.f_system).collect();
    let (peak_n, peak) = (1..cv.len()).map(|n| (n, cv[n])).fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let close = (1..cv.len()).find(|&n| cv[n] > 1.0 - 1e-6);
    let dips_after = close.is_some_and(|n| cv[n + 1..].iter().any(|&f| f < 0.99));
    let dv: Vec<f64> = runs.dv_baseline().steady.iter().map(|p| p.f_system).collect();
    let dv_ok = dv[100] < 1.0 - 1e-3 && dv[100] > dv[1];
    Outcome::new(
        close.is_some() && dips_after && dv_ok,
        format!(
            "cv: max F_system 1 - {:.3e} at n={peak_n}, first n with F > 1 - 1e-6: {close:?}; dv: F(1) = {:.6}, F(100) = {:.6}",
            1.0 - peak,
            dv[1],
            dv[100]
        ),
    )
}

fn window_robustness(_: &Runs) -> Outcome {
    let base = load("dv_baseline.toml");
    let reports: Vec<(usize, BoundReport)> = (2..=5)
        .map(|w| {
            let mut cfg = base.clone();
            cfg.window = Window::Fixed(w);
            cfg.hierarchy_levels = vec![0];
            (w, report(&cfg))
        })
        .collect();
    let reference = &reports[3].1;
    let mut pass = true;
    let mut log = Vec::new();
    for s in [20, 40, 60, 80, 100] {
        let want = reference.rhs_at(s, 0).unwrap();
        let mut line = format!("s={s}:");
        for (name, sel) in [("env", 0), ("corr1", 1), ("corr2", 2)] {
            let pick = |t: &precursor_core::precursors::RhsTerms<f64>| [t.env, t.corr1, t.corr2][sel];
            let w5 = pick(want);
            let delta = reports[..3].iter().map(|(_, r)| (pick(r.rhs_at(s, 0).unwrap()) - w5).abs()).fold(0.0, f64::max);
            // A term that vanishes at window 5 must vanish at every window.
            let ok = if w5.abs() < 1e-12 { delta < 1e-12 } else { delta < 0.1 * w5.abs() };
            pass &= ok;
            line += &format!(" {name} {w5:.4e} (max delta {delta:.2e}");
            if w5.abs() >= 1e-12 {
                line += &format!(" = {:.2}%", 100.0 * delta / w5.abs());
            }
            line += ")";
        }
        log.push(line);
    }
    Outcome::new(pass, format!("windows 2..5 at level 0, deltas against window 5:\n        {}", log.join("\n        ")))
}

fn determinism(_: &Runs) -> Outcome {
    let tmp = tempfile::TempDir::new().unwrap();
    let mut compared = 0;
    let mut mismatched = Vec::new();
    for name in ["dv_baseline", "cv_baseline"] {
        let dirs = [1, 8].map(|n| tmp.path().join(format!("{name}_{n}")));
        for (dir, n) in dirs.iter().zip([1, 8]) {
            let opts = RunOptions { output_dir: Some(dir.clone()), threads: Some(n) };
            if let Err(e) = run_config(load(&format!("{name}.toml")), &opts) {
                return Outcome::new(false, format!("{name} with {n} threads failed: {e}"));
            }
        }
        let mut files: Vec<_> = std::fs::read_dir(&dirs[0])
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .filter(|f| f.to_string_lossy().ends_with(".csv"))
            .collect();
        files.sort();
        for f in files {
            let (a, b) = (std::fs::read(dirs[0].join(&f)).unwrap(), std::fs::read(dirs[1].join(&f)).ok());
            compared += 1;
            if b.as_deref() != Some(&a[..]) {
                mismatched.push(format!("{name}/{}", f.to_string_lossy()));
            }
        }
    }
    Outcome::new(
        compared >= 8 && mismatched.is_empty(),
        format!("{compared} CSVs compared between 1 and 8 threads, mismatches: {mismatched:?}"),
    )
}

pub type Check = fn(&Runs) -> Outcome;

pub const CHECKS: [(&str, Check); 12] = [
    ("exact bound on full-history runs", exact_bound),
    ("hierarchy monotone, zero at the window", hierarchy),
    ("stationary branch has no correlations", stationary_branch),
    ("no revivals from the initial state", no_initial_revivals),
    ("markovian limit has no revivals", markovian_limit),
    ("cv sign pattern of revival rows", cv_sign_pattern),
    ("erasure dichotomy", erasure),
    ("fidelity oracles agree", oracle_agreement),
    ("information conservation", information_conservation),
    ("steady-state traces", steady_traces),
    ("window robustness", window_robustness),
    ("thread-count determinism", determinism),
];
