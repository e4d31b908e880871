use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::bigroot::root_fractional_digits;
use crate::bitgen::{BitStream, DigitStream, GeneratorConfig, MrngStream};
use crate::error::{Error, Result};
use crate::primes::{first_n_primes, prime_pair_sets};
use crate::reference;
use crate::stats::{
    ones_count_summary, Battery, BatchOutcome, DistributionSummary, PairTally, TestSelector,
};

use super::kv::{manifest_path, RunManifest};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum BitFormat {
    /// One '0'/'1' character per bit, newline-terminated.
    Ascii,
    /// Eight bits per byte, first bit in the most significant position.
    Packed,
}

impl BitFormat {
    fn name(self) -> &'static str {
        match self {
            BitFormat::Ascii => "ascii",
            BitFormat::Packed => "packed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Transitions,
    Dyads,
    Triads,
    Tetrads,
    Pentads,
    Distribution,
    Pairs,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Transitions => "transitions",
            Suite::Dyads => "dyads",
            Suite::Triads => "triads",
            Suite::Tetrads => "tetrads",
            Suite::Pentads => "pentads",
            Suite::Distribution => "distribution",
            Suite::Pairs => "pairs",
            Suite::All => "all",
        }
    }

    fn chi_tests(self) -> Vec<TestSelector> {
        match self {
            Suite::Transitions => vec![TestSelector::Transitions],
            Suite::Dyads => vec![TestSelector::Dyads],
            Suite::Triads => vec![TestSelector::Triads],
            Suite::Tetrads => vec![TestSelector::Tetrads],
            Suite::Pentads => vec![TestSelector::Pentads],
            Suite::All => TestSelector::ALL.to_vec(),
            Suite::Distribution | Suite::Pairs => vec![],
        }
    }

    fn has_distribution(self) -> bool {
        matches!(self, Suite::Distribution | Suite::All)
    }

    fn has_pairs(self) -> bool {
        matches!(self, Suite::Pairs | Suite::All)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Scale {
    Desk,
    Paper,
}

/// How much of the stream each part of a suite consumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteSizes {
    /// Strings per chi-square test, each at the test's reference length.
    pub chi_strings: usize,
    pub dist_strings: usize,
    pub dist_ls: usize,
    pub pairs: usize,
}

impl SuiteSizes {
    pub const DESK: SuiteSizes = SuiteSizes {
        chi_strings: 1000,
        dist_strings: 10_000,
        dist_ls: 1000,
        pairs: 1_000_000,
    };

    pub const FULL: SuiteSizes = SuiteSizes {
        chi_strings: 1000,
        dist_strings: reference::ONES_STRINGS,
        dist_ls: reference::ONES_LENGTH,
        pairs: reference::PAIR_COUNT as usize,
    };

    fn bits_needed(&self, suite: Suite) -> usize {
        let chi = suite
            .chi_tests()
            .iter()
            .map(|t| self.chi_strings * t.reference_length())
            .max()
            .unwrap_or(0);
        let dist = if suite.has_distribution() {
            self.dist_strings * self.dist_ls
        } else {
            0
        };
        chi.max(dist)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResults {
    pub suite: Suite,
    pub alpha: f64,
    pub batches: Vec<BatchOutcome<f64>>,
    pub distribution: Option<DistributionSummary<f64>>,
    pub pairs: Option<PairTally>,
    pub bits_used: usize,
}

/// Runs the selected tests. Every test reads its strings from the start of
/// the same stream; the pair tally reads the raw pair stream from its start.
pub fn run_suite(
    config: &GeneratorConfig,
    suite: Suite,
    sizes: SuiteSizes,
    alpha: f64,
    workers: usize,
) -> Result<SuiteResults> {
    config.validate()?;
    let battery = Battery::new(alpha)?;
    let needed = sizes.bits_needed(suite);
    let bits = if needed > 0 {
        MrngStream::new(*config)?.with_workers(workers).take_bits(needed)
    } else {
        BitStream::new()
    };
    let batches = suite
        .chi_tests()
        .into_iter()
        .map(|t| battery.batch(t, bits.as_slice(), sizes.chi_strings, t.reference_length()))
        .collect::<Result<Vec<_>>>()?;
    let distribution = if suite.has_distribution() {
        Some(ones_count_summary(bits.as_slice(), sizes.dist_strings, sizes.dist_ls)?)
    } else {
        None
    };
    let pairs = if suite.has_pairs() {
        let mut stream = MrngStream::new(*config)?.with_workers(workers);
        Some(PairTally::from_pairs(stream.take_pairs(sizes.pairs))?)
    } else {
        None
    };
    Ok(SuiteResults {
        suite,
        alpha,
        batches,
        distribution,
        pairs,
        bits_used: needed,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn finish(mut manifest: RunManifest, started: Instant, anchor: &Path) -> Result<RunManifest> {
    manifest.timing_seconds = started.elapsed().as_secs_f64();
    manifest.write(&manifest_path(anchor))?;
    Ok(manifest)
}

/// Writes `count` bits in the chosen format and a manifest beside them.
pub fn cmd_gen_bits(
    config: &GeneratorConfig,
    count: usize,
    format: BitFormat,
    out: &Path,
    workers: usize,
) -> Result<RunManifest> {
    let started = Instant::now();
    if count == 0 {
        return Err(Error::invalid("--count must be at least 1"));
    }
    let mut stream = MrngStream::new(*config)?.with_workers(workers);
    let bits = stream.take_bits(count);
    let bytes = match format {
        BitFormat::Ascii => {
            let mut s = bits.to_string().into_bytes();
            s.push(b'\n');
            s
        }
        BitFormat::Packed => bits.to_packed(),
    };
    write_file(out, &bytes)?;

    let mut m = RunManifest::new("gen-bits", *config);
    m.params.insert("format".into(), format.name().into());
    m.counts.insert("bits".into(), bits.len() as u64);
    m.counts.insert("pairs".into(), stream.pairs_emitted());
    m.counts.insert("bytes".into(), bytes.len() as u64);
    m.outputs.push(out.to_path_buf());
    finish(m, started, out)
}

/// Writes `count` base-10 digits and a manifest beside them.
pub fn cmd_gen_digits(
    config: &GeneratorConfig,
    count: usize,
    out: &Path,
    workers: usize,
) -> Result<RunManifest> {
    let started = Instant::now();
    if count == 0 {
        return Err(Error::invalid("--count must be at least 1"));
    }
    let stream = MrngStream::new(*config)?.with_workers(workers);
    let mut digits = DigitStream::new(stream);
    let produced = digits.take_digits(count);
    let mut text: Vec<u8> = produced.iter().map(|d| b'0' + d).collect();
    text.push(b'\n');
    write_file(out, &text)?;

    let mut m = RunManifest::new("gen-digits", *config);
    m.counts.insert("digits".into(), produced.len() as u64);
    m.counts.insert("bits_consumed".into(), digits.bits_consumed());
    m.counts.insert("pairs".into(), digits.into_inner().pairs_emitted());
    m.outputs.push(out.to_path_buf());
    finish(m, started, out)
}

/// `report.csv` -> `report<suffix>` in the same directory.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    path.with_file_name(format!("{stem}{suffix}"))
}

pub fn summary_csv(results: &SuiteResults) -> String {
    let mut s = String::from("test,ls,strings,passed,failed,failed_percent,alpha\n");
    for b in &results.batches {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{:.1},{}",
            b.test,
            b.ls,
            b.reports.len(),
            b.passed(),
            b.failed(),
            b.failed_percent(),
            results.alpha
        );
    }
    s
}

pub fn strings_csv(results: &SuiteResults) -> String {
    let mut s = String::from("test,index,ls,dof,statistic,critical,passed\n");
    for b in &results.batches {
        for (i, r) in b.reports.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{},{:.6},{:.6},{}",
                b.test, i, r.ls, r.dof, r.statistic, r.critical, r.passed
            );
        }
    }
    s
}

pub fn distribution_csv(d: &DistributionSummary<f64>) -> String {
    let mut s = String::from("band,lower,upper,normal_percent,measured_percent\n");
    for k in 1..=3u32 {
        let kf = f64::from(k);
        let _ = writeln!(
            s,
            "{k}sigma,{:.4},{:.4},{:.2},{:.4}",
            d.mu - kf * d.sigma,
            d.mu + kf * d.sigma,
            reference::ONES_BANDS[k as usize - 1].0,
            d.within(k).unwrap()
        );
    }
    s
}

pub fn histogram_csv(d: &DistributionSummary<f64>) -> String {
    let mut s = String::from("ones,strings\n");
    for (n, c) in d.histogram.iter().enumerate() {
        let _ = writeln!(s, "{n},{c}");
    }
    s
}

pub fn pairs_csv(t: &PairTally) -> String {
    let mut s = String::from("i,j,count,frequency\n");
    for i in 0..10 {
        for j in 0..10 {
            let _ = writeln!(
                s,
                "{i},{j},{},{:.5}",
                t.count(i, j),
                t.rounded_frequency::<f64>(i, j)
            );
        }
    }
    s
}

fn batch_text(s: &mut String, b: &BatchOutcome<f64>, alpha: f64) {
    let name = b.test.name();
    let title = format!("{}{} test", name[..1].to_uppercase(), &name[1..]);
    let _ = writeln!(s, "{title}  (L_s = {}, {} strings, alpha = {alpha})", b.ls, b.reports.len());
    let _ = writeln!(s, "  Passed test      {:>8}", b.passed());
    let _ = writeln!(s, "  Failed test      {:>8}", b.failed());
    let _ = writeln!(s, "  Failed test (%)  {:>7.1}%", b.failed_percent());
    let _ = writeln!(s);
}

fn distribution_text(s: &mut String, d: &DistributionSummary<f64>) {
    let _ = writeln!(
        s,
        "Ones-count distribution  ({} strings, L_s = {}, mu = {}, sigma = {:.4})",
        d.strings(),
        d.ls,
        d.mu,
        d.sigma
    );
    let _ = writeln!(s, "  Interval        Normal   Measured");
    for k in 1..=3u32 {
        let _ = writeln!(
            s,
            "  mu +/- {k} sigma  {:>6.2}%  {:>8.2}%",
            reference::ONES_BANDS[k as usize - 1].0,
            d.within(k).unwrap()
        );
    }
    let _ = writeln!(s);
}

fn pairs_text(s: &mut String, t: &PairTally) {
    let _ = writeln!(s, "Ordered digit pair frequencies f(i,j)  ({} pairs)", t.total());
    let _ = write!(s, "  i\\j");
    for j in 0..10 {
        let _ = write!(s, " {j:>7}");
    }
    let _ = writeln!(s);
    for i in 0..10 {
        let _ = write!(s, "  {i:>3}");
        for j in 0..10 {
            let _ = write!(s, " {:.5}", t.rounded_frequency::<f64>(i, j));
        }
        let _ = writeln!(s);
    }
    let _ = writeln!(s, "  max |f(i,j) - f(j,i)| = {:.5}", t.max_asymmetry::<f64>());
    let _ = writeln!(s);
}

pub fn report_text(results: &SuiteResults) -> String {
    let mut s = String::new();
    for b in &results.batches {
        batch_text(&mut s, b, results.alpha);
    }
    if let Some(d) = &results.distribution {
        distribution_text(&mut s, d);
    }
    if let Some(t) = &results.pairs {
        pairs_text(&mut s, t);
    }
    s
}

/// Runs a suite and writes CSV plus plain-text renderings next to `out`.
pub fn cmd_test(
    config: &GeneratorConfig,
    suite: Suite,
    sizes: SuiteSizes,
    alpha: f64,
    out: &Path,
    workers: usize,
) -> Result<RunManifest> {
    let started = Instant::now();
    let results = run_suite(config, suite, sizes, alpha, workers)?;
    let mut m = RunManifest::new("test", *config);
    m.params.insert("suite".into(), suite.name().into());
    m.params.insert("alpha".into(), alpha.to_string());
    m.counts.insert("bits".into(), results.bits_used as u64);

    let mut emit = |path: PathBuf, body: String| -> Result<()> {
        write_file(&path, body.as_bytes())?;
        m.outputs.push(path);
        Ok(())
    };
    if !results.batches.is_empty() {
        emit(out.to_path_buf(), summary_csv(&results))?;
        emit(sibling(out, ".strings.csv"), strings_csv(&results))?;
    }
    if let Some(d) = &results.distribution {
        emit(sibling(out, ".distribution.csv"), distribution_csv(d))?;
        emit(sibling(out, ".histogram.csv"), histogram_csv(d))?;
    }
    if let Some(t) = &results.pairs {
        emit(sibling(out, ".pairs.csv"), pairs_csv(t))?;
    }
    emit(sibling(out, ".txt"), report_text(&results))?;

    for b in &results.batches {
        m.counts.insert(format!("{}.passed", b.test), b.passed() as u64);
        m.counts.insert(format!("{}.failed", b.test), b.failed() as u64);
    }
    if let Some(d) = &results.distribution {
        m.counts.insert("distribution.strings".into(), d.strings());
    }
    if let Some(t) = &results.pairs {
        m.counts.insert("pairs".into(), t.total());
    }
    finish(m, started, out)
}

/// Failure-count band for 1000 strings at alpha 0.05: 50 +/- 3 sqrt(1000 * 0.05 * 0.95).
pub const FAILED_BAND: (usize, usize) = (29, 71);
/// (target percent, tolerance in percentage points) for the 1, 2, 3 sigma bands.
pub const ONES_TOLERANCE: [(f64, f64); 3] = [(68.27, 1.5), (95.4, 0.7), (99.7, 0.3)];
/// Every pair cell must lie in this range.
pub const PAIR_CELL_RANGE: (f64, f64) = (0.009, 0.011);
pub const PAIR_MAX_ASYMMETRY: f64 = 0.001;

/// Result of each tolerance check in a reproduction run.
#[derive(Clone, Debug, PartialEq)]
pub struct ReproCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub fn repro_checks(results: &SuiteResults) -> Vec<ReproCheck> {
    let mut checks = Vec::new();
    for b in &results.batches {
        let f = b.failed();
        checks.push(ReproCheck {
            name: format!("table3.{}", b.test),
            passed: (FAILED_BAND.0..=FAILED_BAND.1).contains(&f),
            detail: format!("failed {f} of {}, band [{}, {}]", b.reports.len(), FAILED_BAND.0, FAILED_BAND.1),
        });
    }
    if let Some(d) = &results.distribution {
        for (k, &(target, tol)) in (1..=3u32).zip(ONES_TOLERANCE.iter()) {
            let got = d.within(k).unwrap();
            checks.push(ReproCheck {
                name: format!("table4.within_{k}s"),
                passed: (got - target).abs() <= tol,
                detail: format!("{got:.2}% vs {target} +/- {tol}"),
            });
        }
    }
    if let Some(t) = &results.pairs {
        let cells: Vec<f64> = (0..10)
            .flat_map(|i| (0..10).map(move |j| (i, j)))
            .map(|(i, j)| t.frequency::<f64>(i, j))
            .collect();
        let lo = cells.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = cells.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        checks.push(ReproCheck {
            name: "tables1-2.cell_range".into(),
            passed: lo >= PAIR_CELL_RANGE.0 && hi <= PAIR_CELL_RANGE.1,
            detail: format!("cells in [{lo:.5}, {hi:.5}]"),
        });
        let asym = t.max_asymmetry::<f64>();
        checks.push(ReproCheck {
            name: "tables1-2.symmetry".into(),
            passed: asym <= PAIR_MAX_ASYMMETRY,
            detail: format!("max |f(i,j) - f(j,i)| = {asym:.5}"),
        });
    }
    checks
}

fn t1_csv(t: &PairTally) -> String {
    let mut s = String::from("i,j,reference_f_ij,measured_f_ij,reference_f_ji,measured_f_ji\n");
    for i in 0..10 {
        for j in (i + 1)..10 {
            let _ = writeln!(
                s,
                "{i},{j},{:.5},{:.5},{:.5},{:.5}",
                reference::PAIR_FREQUENCIES[i][j],
                t.rounded_frequency::<f64>(i, j),
                reference::PAIR_FREQUENCIES[j][i],
                t.rounded_frequency::<f64>(j, i)
            );
        }
    }
    s
}

fn t2_csv(t: &PairTally) -> String {
    let mut s = String::from("i,reference_f_ii,measured_f_ii\n");
    for i in 0..10 {
        let _ = writeln!(
            s,
            "{i},{:.5},{:.5}",
            reference::PAIR_FREQUENCIES[i][i],
            t.rounded_frequency::<f64>(i, i)
        );
    }
    s
}

fn t3_csv(batches: &[BatchOutcome<f64>]) -> String {
    let mut s = String::from(
        "test,ls,reference_passed,reference_failed,measured_passed,measured_failed,measured_failed_percent,band_low,band_high\n",
    );
    for b in batches {
        let (rp, rf) = reference::batch_outcome(b.test);
        let _ = writeln!(
            s,
            "{},{},{rp},{rf},{},{},{:.1},{},{}",
            b.test,
            b.ls,
            b.passed(),
            b.failed(),
            b.failed_percent(),
            FAILED_BAND.0,
            FAILED_BAND.1
        );
    }
    s
}

fn t4_csv(d: &DistributionSummary<f64>) -> String {
    let mut s = String::from("interval,normal_percent,reference_percent,measured_percent,target,tolerance_pp\n");
    for k in 1..=3u32 {
        let (normal, published) = reference::ONES_BANDS[k as usize - 1];
        let (target, tol) = ONES_TOLERANCE[k as usize - 1];
        let _ = writeln!(
            s,
            "mu+/-{k}sigma,{normal:.2},{published:.2},{:.2},{target},{tol}",
            d.within(k).unwrap()
        );
    }
    s
}

/// What a paper-scale run would do, shown before asking for confirmation.
#[derive(Clone, Debug, PartialEq)]
pub struct ReproPlan {
    pub config: GeneratorConfig,
    pub sizes: SuiteSizes,
    pub bits_needed: usize,
    pub entries_needed: usize,
    pub estimated_seconds: f64,
}

impl ReproPlan {
    pub fn render(&self) -> String {
        format!(
            "reproduction plan\n  n_pairs = {}\n  rounds = {}\n  precision_digits = {}\n  skip_digits = {}\n  \
             block_index = {}\n  chi-square strings per test = {}\n  ones-count strings = {} x {} bits\n  \
             digit pairs = {}\n  bits needed = {}\n  schedule entries needed = ~{}\n  \
             estimated time on one worker = ~{:.0} s\nrerun with --confirm to execute\n",
            self.config.n_pairs,
            self.config.rounds,
            self.config.precision_digits,
            self.config.skip_digits,
            self.config.block_index,
            self.sizes.chi_strings,
            self.sizes.dist_strings,
            self.sizes.dist_ls,
            self.sizes.pairs,
            self.bits_needed,
            self.entries_needed,
            self.estimated_seconds
        )
    }
}

/// Entries needed for the plan, and a time estimate from timing one root
/// pair per distinct degree involved.
pub fn plan_repro(config: &GeneratorConfig, sizes: SuiteSizes) -> Result<ReproPlan> {
    config.validate()?;
    let bits_needed = sizes.bits_needed(Suite::All);
    // ties remove about a tenth of the pairs
    let per_entry_bits = config.window() as f64 * 0.9;
    let per_entry_pairs = config.window() as f64;
    let entries_needed = ((bits_needed as f64 / per_entry_bits).max(sizes.pairs as f64 / per_entry_pairs))
        .ceil() as usize;
    let sets = prime_pair_sets(config.n_pairs, config.block_index);
    let degrees = first_n_primes(config.rounds);
    let mut seconds = 0.0;
    let mut timed: Vec<(u32, f64)> = Vec::new();
    for k in 0..entries_needed {
        // later blocks reuse the same degrees; radicand size barely matters
        let k = k % (config.n_pairs * config.rounds);
        let degree = degrees.nth(k / config.n_pairs + 1).expect("one degree per round") as u32;
        let left = sets.c1[k % config.n_pairs];
        let cost = match timed.iter().find(|(d, _)| *d == degree) {
            Some(&(_, c)) => c,
            None => {
                let t = Instant::now();
                root_fractional_digits(left, degree, config.skip_digits + 1, config.window())?;
                let c = 2.0 * t.elapsed().as_secs_f64();
                timed.push((degree, c));
                c
            }
        };
        seconds += cost;
    }
    Ok(ReproPlan {
        config: *config,
        sizes,
        bits_needed,
        entries_needed,
        estimated_seconds: seconds,
    })
}

#[derive(Debug)]
pub enum ReproOutcome {
    Completed(RunManifest, Vec<ReproCheck>),
    NeedsConfirmation(ReproPlan),
}

/// Side-by-side published vs measured tables at desk or full scale.
/// Full scale only runs with `confirmed`.
pub fn cmd_repro(scale: Scale, dir: &Path, confirmed: bool, workers: usize) -> Result<ReproOutcome> {
    let (config, sizes) = match scale {
        Scale::Desk => (GeneratorConfig::desk(), SuiteSizes::DESK),
        Scale::Paper => (GeneratorConfig::paper_scale(), SuiteSizes::FULL),
    };
    repro_with(config, sizes, scale, dir, confirmed, workers)
}

/// [`cmd_repro`] with explicit parameters.
pub fn repro_with(
    config: GeneratorConfig,
    sizes: SuiteSizes,
    scale: Scale,
    dir: &Path,
    confirmed: bool,
    workers: usize,
) -> Result<ReproOutcome> {
    if scale == Scale::Paper && !confirmed {
        return plan_repro(&config, sizes).map(ReproOutcome::NeedsConfirmation);
    }
    let started = Instant::now();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let results = run_suite(&config, Suite::All, sizes, crate::stats::DEFAULT_ALPHA, workers)?;
    let checks = repro_checks(&results);

    let mut m = RunManifest::new("repro", config);
    m.params.insert(
        "scale".into(),
        match scale {
            Scale::Desk => "desk",
            Scale::Paper => "paper",
        }
        .into(),
    );
    let tally = results.pairs.as_ref().expect("suite all includes pairs");
    let dist = results.distribution.as_ref().expect("suite all includes distribution");
    let mut summary = report_text(&results);
    summary.push_str("Checks\n");
    for c in &checks {
        let _ = writeln!(summary, "  [{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let files = [
        ("t1_pairs.csv", t1_csv(tally)),
        ("t2_ties.csv", t2_csv(tally)),
        ("t3_chi_square.csv", t3_csv(&results.batches)),
        ("t4_ones.csv", t4_csv(dist)),
        ("summary.txt", summary),
    ];
    for (name, body) in files {
        let path = dir.join(name);
        write_file(&path, body.as_bytes())?;
        m.outputs.push(path);
    }
    m.counts.insert("bits".into(), results.bits_used as u64);
    m.counts.insert("pairs".into(), tally.total());
    m.counts.insert("checks_passed".into(), checks.iter().filter(|c| c.passed).count() as u64);
    m.counts.insert("checks_failed".into(), checks.iter().filter(|c| !c.passed).count() as u64);
    m.timing_seconds = started.elapsed().as_secs_f64();
    m.write(&dir.join("repro.manifest"))?;
    Ok(ReproOutcome::Completed(m, checks))
}
