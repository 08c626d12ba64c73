//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

#[path = "../../../core/tests/support/dict_table.rs"]
mod dict_table;
#[path = "../../../core/tests/support/oracle.rs"]
mod oracle;

use std::cell::Cell;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use namegender_core::eval::{accuracy_identity_check, f1, metrics, ConfusionTally, EvaluationRun};
use namegender_core::fusion::{mixed1, mixed2};
use namegender_core::namedb::{lookup_dict, parse_dict_file, parse_ssa_dir, CountRecord};
use namegender_core::pipeline::Backends;
use namegender_core::report::parse_methods_csv;
use namegender_core::webclients::{ClientConfig, ClientMode, FixtureStore, WebClients};
use namegender_core::{extract_first_name, BackendId, CountryCode, GenderLabel, PersonRecord, Prediction, TrueGender};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{label}: got {got}, expected {want} +/- {tol}"))
}

fn criterion_1() -> Outcome {
    let (n_f, n_m) = (723, 693);
    close("F1(0.96, 0.79)", f1(0.96, 0.79), 0.867, 0.005)?;
    close("F1(0.95, 0.86)", f1(0.95, 0.86), 0.903, 0.005)?;
    close("accuracy(0.86, 0.77)", accuracy_identity_check(0.86, 0.77, n_f, n_m), 0.816, 0.005)?;
    close("accuracy(0.79, 0.70)", accuracy_identity_check(0.79, 0.70, n_f, n_m), 0.746, 0.005)?;
    close("accuracy(0.95, 0.89)", accuracy_identity_check(0.95, 0.89, n_f, n_m), 0.921, 0.005)?;
    // rounded to table precision
    let two = |v: f64| (v * 100.0).round() / 100.0;
    ensure(two(f1(0.95, 0.86)) == 0.90, || "Genderize female F1 does not round to 0.90".into())?;
    ensure(two(accuracy_identity_check(0.86, 0.77, n_f, n_m)) == 0.82, || "Genderize accuracy".into())?;
    ensure(two(accuracy_identity_check(0.79, 0.70, n_f, n_m)) == 0.75, || "SSA accuracy".into())?;
    ensure(two(accuracy_identity_check(0.95, 0.89, n_f, n_m)) == 0.92, || "Mixed1 accuracy".into())?;
    Ok("5 identities within 0.005".into())
}

fn random_rows(rng: &mut StdRng) -> Vec<oracle::Row> {
    let countries = ["US", "DE", "IT", "CN", "TR", "BR"];
    let n = rng.random_range(1..=50);
    (0..n)
        .map(|_| oracle::Row {
            truth: if rng.random_bool(0.5) { 'F' } else { 'M' },
            decision: rng.random_range(-1..=1),
            country: rng
                .random_bool(0.85)
                .then(|| countries[rng.random_range(0..countries.len())].to_string()),
        })
        .collect()
}

fn criterion_2() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    for case in 0..200 {
        let rows = random_rows(&mut rng);
        let records: Vec<PersonRecord> = rows
            .iter()
            .map(|r| {
                let truth = if r.truth == 'F' { TrueGender::Female } else { TrueGender::Male };
                let country = r.country.as_deref().map(|c| c.parse::<CountryCode>().unwrap());
                PersonRecord::new("Test Person", country, truth).unwrap()
            })
            .collect();
        let preds: Vec<Prediction> = rows
            .iter()
            .map(|r| {
                let magnitude = rng.random_range(0.01..=1.0);
                Prediction::new(f64::from(r.decision) * magnitude, BackendId::Dict).unwrap()
            })
            .collect();
        let want = oracle::expected(&rows);
        let t = namegender_core::eval::tally(records.iter().zip(&preds));
        let cells = [t.tp_f, t.fp_f, t.tp_m, t.fp_m, t.abstain_f, t.abstain_m];
        ensure(cells == want.cells, || format!("case {case}: tally {cells:?} != {:?}", want.cells))?;
        let m = metrics(&t).map_err(|e| e.to_string())?;
        for (name, got, exp) in [
            ("precision_f", m.precision_f, want.precision_f),
            ("recall_f", m.recall_f, want.recall_f),
            ("f1_f", m.f1_f, want.f1_f),
            ("precision_m", m.precision_m, want.precision_m),
            ("recall_m", m.recall_m, want.recall_m),
            ("f1_m", m.f1_m, want.f1_m),
            ("accuracy", m.accuracy, want.accuracy),
            ("coverage", m.coverage, want.coverage),
        ] {
            close(&format!("case {case} {name}"), got, exp, 1e-12)?;
        }
        ensure(
            (m.zero_support_f, m.zero_support_m) == (want.zero_support_f, want.zero_support_m),
            || format!("case {case}: zero-support flags"),
        )?;
        let min = rng.random_range(1..=8);
        let pairs: Vec<(PersonRecord, Prediction)> = records.into_iter().zip(preds).collect();
        let report = namegender_core::eval::country_breakdown(&pairs, min).map_err(|e| e.to_string())?;
        let got: Vec<(String, usize, usize)> = report
            .rows
            .iter()
            .map(|r| (r.group.to_string(), r.instance_count, r.correct[&BackendId::Dict]))
            .collect();
        let exp = oracle::country_rows(&rows, min);
        ensure(got == exp, || format!("case {case}: countries {got:?} != {exp:?}"))?;
        for row in &report.rows {
            let acc = row.accuracy(BackendId::Dict).unwrap();
            close("country accuracy", acc, row.correct[&BackendId::Dict] as f64 / row.instance_count as f64, 1e-12)?;
        }
    }
    Ok("200 random datasets agree with the brute-force reference".into())
}

fn criterion_3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let score = |rng: &mut StdRng| match rng.random_range(0..10) {
        0 | 1 => 0.0,
        2 => 1.0,
        3 => -1.0,
        _ => rng.random_range(-1.0..=1.0),
    };
    for case in 0..1000 {
        let n = Prediction::new(score(&mut rng), BackendId::Genderize).unwrap();
        let i = Prediction::new(score(&mut rng), BackendId::Face).unwrap();
        let called = Cell::new(false);
        let m1 = mixed1::<()>(n, || {
            called.set(true);
            Ok(i)
        })
        .unwrap();
        if n.is_abstain() {
            ensure(called.get() && m1.score() == i.score(), || format!("case {case}: Mixed1 fallback"))?;
        } else {
            ensure(!called.get(), || format!("case {case}: image supplier invoked for a decided name"))?;
            ensure(m1.score() == n.score() && m1.label() == n.label(), || format!("case {case}: Mixed1 changed the name decision"))?;
        }
        let flip = |p: Prediction| Prediction::new(-p.score(), p.source()).unwrap();
        let m2 = mixed2(n, i);
        ensure(mixed2(flip(n), flip(i)).score() == -m2.score(), || format!("case {case}: antisymmetry"))?;
        let swapped = mixed2(
            Prediction::new(i.score(), BackendId::Genderize).unwrap(),
            Prediction::new(n.score(), BackendId::Face).unwrap(),
        );
        ensure(swapped.score() == m2.score(), || format!("case {case}: argument symmetry"))?;
        ensure(mixed2(n, flip(Prediction::new(n.score(), BackendId::Face).unwrap())).is_abstain(), || {
            format!("case {case}: exact cancellation did not abstain")
        })?;
    }
    Ok("1000 random prediction pairs".into())
}

fn criterion_4() -> Outcome {
    let testdata = repo().join("testdata");
    let path = testdata.join("nam_dict_sample.txt");
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let data_lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).collect();
    ensure(data_lines.len() >= 50, || format!("only {} dictionary lines", data_lines.len()))?;
    for code in ["M ", "1M", "?M", "F ", "1F", "?F", "? ", "= "] {
        ensure(data_lines.iter().any(|l| l.starts_with(code)), || format!("fixture lacks code {code:?}"))?;
    }

    let db = parse_dict_file(&path).map_err(|e| e.to_string())?;
    let index = db.dict_index().ok_or("not a dictionary database")?;
    ensure(index.len() == dict_table::TABLE.len(), || {
        format!("{} keys parsed, {} expected", index.len(), dict_table::TABLE.len())
    })?;
    let mut countries = std::collections::BTreeSet::new();
    for (key, entries) in dict_table::TABLE {
        let parsed = index.get(*key).ok_or_else(|| format!("missing key {key}"))?;
        let got: Vec<(&str, BTreeMap<&str, u8>)> = parsed.iter().map(|e| (e.code.as_str(), e.country_freq())).collect();
        let want: Vec<(&str, BTreeMap<&str, u8>)> =
            entries.iter().map(|(c, f)| (*c, f.iter().copied().collect())).collect();
        ensure(got == want, || format!("{key}: parsed {got:?}, expected {want:?}"))?;
        countries.extend(entries.iter().flat_map(|(_, f)| f.iter().map(|(c, _)| *c)));
    }
    ensure(countries.len() >= 5, || "fewer than 5 countries".into())?;

    let key = extract_first_name("Andrea").map_err(|e| e.to_string())?;
    let it = lookup_dict(&db, &key, Some("IT".parse().unwrap())).map_err(|e| e.to_string())?;
    let de = lookup_dict(&db, &key, Some("DE".parse().unwrap())).map_err(|e| e.to_string())?;
    ensure(it.label() == GenderLabel::Male, || format!("andrea/IT gave {:?}", it.label()))?;
    ensure(de.label() == GenderLabel::Female, || format!("andrea/DE gave {:?}", de.label()))?;

    let ssa = parse_ssa_dir(&testdata.join("ssa")).map_err(|e| e.to_string())?;
    for &(name, male, female) in dict_table::SSA_SUMS {
        let want = CountRecord { male_count: male, female_count: female };
        ensure(ssa.counts(name) == Some(want), || format!("SSA {name}: {:?} != {want:?}", ssa.counts(name)))?;
    }
    Ok(format!(
        "{} dictionary lines, {} keys, {} countries; andrea IT=male DE=female; SSA sums",
        data_lines.len(),
        index.len(),
        countries.len()
    ))
}

fn evaluate_demo(out: &Path) -> Result<(), String> {
    let demo = repo().join("demo");
    let o = Command::new(env!("CARGO_BIN_EXE_namegender"))
        .arg("evaluate")
        .arg(demo.join("dataset.csv"))
        .arg("--config")
        .arg(demo.join("namegender.toml"))
        .arg("--out-dir")
        .arg(out)
        // unreachable endpoints: any network attempt would fail the run
        .args(["--endpoint-genderize", "http://127.0.0.1:9/"])
        .args(["--endpoint-face", "http://127.0.0.1:9/"])
        .args(["--endpoint-images", "http://127.0.0.1:9/"])
        .env("HTTP_PROXY", "http://127.0.0.1:9")
        .env("HTTPS_PROXY", "http://127.0.0.1:9")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), || format!("evaluate failed: {}", String::from_utf8_lossy(&o.stderr)))
}

fn criterion_5() -> Outcome {
    let records = std::fs::read_to_string(repo().join("demo/dataset.csv")).map_err(|e| e.to_string())?;
    let rows: Vec<&str> = records.lines().skip(1).collect();
    let countries: std::collections::BTreeSet<&str> =
        rows.iter().filter_map(|l| l.split(',').nth(1)).filter(|c| !c.is_empty()).collect();
    ensure(rows.len() >= 30 && countries.len() >= 4, || "demo dataset too small".into())?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    evaluate_demo(&a)?;
    evaluate_demo(&b)?;
    for file in ["methods.csv", "countries.csv", "report.txt"] {
        let x = std::fs::read(a.join(file)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join(file)).map_err(|e| e.to_string())?;
        ensure(x == y, || format!("{file} differs between runs"))?;
    }
    Ok(format!("{} records, {} countries, 3 report files byte-identical", rows.len(), countries.len()))
}

fn criterion_6() -> Outcome {
    let demo = repo().join("demo");
    // the fixtures are built so the name API abstains where faces decide
    let records = namegender_core::dataset::load_dataset(&demo.join("dataset.csv"), "country").map_err(|e| e.to_string())?;
    let n = records.len();
    let mut backends = Backends::new();
    let config = ClientConfig { mode: ClientMode::Replay, ..ClientConfig::default() };
    let fixtures = FixtureStore::open(demo.join("fixtures")).map_err(|e| e.to_string())?;
    backends.web = Some(WebClients::with_default_transport(config, None, Some(fixtures)).map_err(|e| e.to_string())?);
    let run: EvaluationRun = backends
        .evaluate(&[BackendId::Genderize, BackendId::Face], records, 1)
        .map_err(|e| e.to_string())?;
    let (names, faces) = (&run.predictions[&BackendId::Genderize], &run.predictions[&BackendId::Face]);
    let rescued = (0..n)
        .filter(|&i| names[i].is_abstain() && faces[i].label() == run.records[i].true_gender().label())
        .count();
    ensure(rescued * 5 >= n, || format!("only {rescued}/{n} name abstentions decided by faces"))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    evaluate_demo(dir.path())?;
    let text = std::fs::read_to_string(dir.path().join("methods.csv")).map_err(|e| e.to_string())?;
    let m = parse_methods_csv(&text).map_err(|e| e.to_string())?;
    let g = m[&BackendId::Genderize];
    for mixed in [BackendId::Mixed1, BackendId::Mixed2] {
        let x = m[&mixed];
        ensure(x.accuracy > g.accuracy, || format!("{mixed} accuracy {} <= Genderize {}", x.accuracy, g.accuracy))?;
        ensure(x.recall_f >= g.recall_f && x.recall_m >= g.recall_m, || format!("{mixed} recall below Genderize"))?;
    }
    Ok(format!(
        "{rescued}/{n} abstentions decided by faces; accuracy Genderize {:.3}, Mixed1 {:.3}, Mixed2 {:.3}",
        g.accuracy, m[&BackendId::Mixed1].accuracy, m[&BackendId::Mixed2].accuracy
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    for case in 0..100 {
        let mut cell = || rng.random_range(0..40u64);
        let mut t = ConfusionTally {
            tp_f: cell(),
            fp_f: cell(),
            tp_m: cell(),
            fp_m: cell(),
            abstain_f: cell(),
            abstain_m: cell(),
        };
        t.tp_f += 1;
        let extra_f = rng.random_range(0..10u64);
        let extra_m = rng.random_range(0..10u64) + u64::from(extra_f == 0);
        let u = t + ConfusionTally { abstain_f: extra_f, abstain_m: extra_m, ..Default::default() };
        let (a, b) = (metrics(&t).unwrap(), metrics(&u).unwrap());
        ensure(a.precision_f == b.precision_f && a.precision_m == b.precision_m, || format!("case {case}: precision moved"))?;
        ensure(b.accuracy < a.accuracy, || format!("case {case}: accuracy {} -> {}", a.accuracy, b.accuracy))?;
    }
    Ok("100 random tallies".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("metric identities", Duration::from_secs(1), criterion_1),
        ("metrics oracle equivalence", Duration::from_secs(10), criterion_2),
        ("fusion properties", Duration::from_secs(1), criterion_3),
        ("parser fixtures", Duration::from_secs(1), criterion_4),
        ("replay determinism", Duration::from_secs(5), criterion_5),
        ("mixed beats name-only", Duration::from_secs(5), criterion_6),
        ("abstention convention", Duration::from_secs(1), criterion_7),
    ];
    let mut failed = 0;
    for (i, (title, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {title} ({:.0?}): {detail}", i + 1, elapsed),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {title} ({:.0?}): {why}", i + 1, elapsed);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
