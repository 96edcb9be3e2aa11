//! End-to-end checks of the command-line front end: determinism,
//! file-chained composability against the in-process report, and the exit
//! code taxonomy.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dualtrace::simulator::FIXTURE_LEXICON;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dualtrace"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dualtrace-cli-{tag}-{}", std::process::id()));
    if dir.exists() {
        std::fs::remove_dir_all(&dir).expect("clean temp dir");
    }
    std::fs::create_dir_all(&dir).expect("create temp dir");
    dir
}

fn write(path: &Path, contents: &str) {
    std::fs::write(path, contents).expect("write file");
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn dualtrace");
    assert!(
        out.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
    out
}

const LAOZI_SCRIPT: &str = "\
# qianlizhixing -> first candidate, comma, shiyuzuxia -> first candidate
type q 70 130\npass\ntype i 70 130\npass\ntype a 70 130\npass\ntype n 70 130\npass
type l 70 130\npass\ntype i 70 130\npass\ntype z 70 130\npass\ntype h 70 130\npass
type i 70 130\npass\ntype x 70 130\npass\ntype i 70 130\npass\ntype n 70 130\npass
type g 70 130\npass
confirm 1 70 600\npass
type , 70 400\npass
type s 70 130\npass\ntype h 70 130\npass\ntype i 70 130\npass\ntype y 70 130\npass
type u 70 130\npass\ntype z 70 130\npass\ntype u 70 130\npass\ntype x 70 130\npass
type i 70 130\npass\ntype a 70 130\npass
confirm 1 70 600\npass
";

#[test]
fn simulate_is_byte_deterministic() {
    let dir = temp_dir("determinism");
    let script = dir.join("laozi.script");
    let lexicon = dir.join("lexicon.txt");
    write(&script, LAOZI_SCRIPT);
    write(&lexicon, FIXTURE_LEXICON);

    for out_name in ["a", "b"] {
        run_ok(bin().args([
            "simulate",
            script.to_str().unwrap(),
            "--lexicon",
            lexicon.to_str().unwrap(),
            "--layout",
            "pinyin",
            "--out",
            dir.join(out_name).to_str().unwrap(),
        ]));
    }
    for file in ["keys.jsonl", "text.jsonl", "truth.json"] {
        assert_eq!(
            read(&dir.join("a").join(file)),
            read(&dir.join("b").join(file)),
            "{file} differs between identical runs"
        );
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn chained_stages_equal_in_process_report() {
    let dir = temp_dir("compose");
    let script = dir.join("laozi.script");
    let lexicon = dir.join("lexicon.txt");
    write(&script, LAOZI_SCRIPT);
    write(&lexicon, FIXTURE_LEXICON);

    let sim = dir.join("sim");
    run_ok(bin().args([
        "simulate",
        script.to_str().unwrap(),
        "--lexicon",
        lexicon.to_str().unwrap(),
        "--layout",
        "pinyin",
        "--out",
        sim.to_str().unwrap(),
    ]));

    let hybrid = dir.join("hybrid");
    run_ok(bin().args([
        "hybridize",
        "--in-keys",
        sim.join("keys.jsonl").to_str().unwrap(),
        "--in-text",
        sim.join("text.jsonl").to_str().unwrap(),
        "--out",
        hybrid.to_str().unwrap(),
    ]));

    let analyzed = dir.join("analyzed");
    let mut analyze = bin();
    analyze.args([
        "analyze",
        "--in-dual",
        hybrid.join("dual.jsonl").to_str().unwrap(),
        "--outlier-sd",
        "2",
        "--format",
        "csv",
        "--out",
        analyzed.to_str().unwrap(),
    ]);
    // The lexicon can come from the environment.
    analyze.env("DUALTRACE_LEXICON", lexicon.to_str().unwrap());
    run_ok(&mut analyze);

    let reported = dir.join("reported");
    run_ok(bin().args([
        "report",
        "--in-keys",
        sim.join("keys.jsonl").to_str().unwrap(),
        "--in-text",
        sim.join("text.jsonl").to_str().unwrap(),
        "--lexicon",
        lexicon.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        reported.to_str().unwrap(),
    ]));

    let chained = read(&analyzed.join("metrics.csv"));
    let in_process = read(&reported.join("metrics.csv"));
    assert_eq!(chained, in_process, "file-chained pipeline differs from in-process report");

    // The primary category counts of the Chinese sample session.
    for line in ["latin_letters,16,", "pinyin_syllables,2,", "words,5,", "ime_before,2,", "ime_after,1,"] {
        assert!(chained.contains(line), "missing {line:?} in:\n{chained}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

const DIANRETAN_KEYS: &str = r#"{"id":266,"kind":"down","key":"d","position":0,"t_ms":1000}
{"id":267,"kind":"down","key":"i","position":1,"t_ms":1200}
{"id":268,"kind":"down","key":"a","position":2,"t_ms":1400}
{"id":269,"kind":"down","key":"n","position":3,"t_ms":1600}
{"id":270,"kind":"down","key":"r","position":4,"t_ms":1800}
{"id":271,"kind":"down","key":"e","position":6,"t_ms":2000}
{"id":272,"kind":"down","key":"t","position":7,"t_ms":2200}
{"id":273,"kind":"down","key":"a","position":9,"t_ms":2400}
{"id":274,"kind":"down","key":"n","position":10,"t_ms":2600}
{"id":275,"kind":"down","key":"SPACEBAR","position":11,"t_ms":2800}
"#;

const DIANRETAN_TEXT: &str = r#"{"pass":0,"text":"","dsw":[0,0],"offset":0,"t_ms":500,"source":"editor"}
{"pass":1,"text":"d","dsw":[0,1],"offset":1,"t_ms":1100,"source":"editor"}
{"pass":2,"text":"di","dsw":[0,2],"offset":1,"t_ms":1300,"source":"editor"}
{"pass":3,"text":"dia","dsw":[0,3],"offset":1,"t_ms":1500,"source":"editor"}
{"pass":4,"text":"dian","dsw":[0,4],"offset":1,"t_ms":1700,"source":"editor"}
{"pass":5,"text":"dian'r","dsw":[0,6],"offset":2,"t_ms":1900,"source":"editor"}
{"pass":6,"text":"dian're","dsw":[0,7],"offset":1,"t_ms":2100,"source":"editor"}
{"pass":7,"text":"dian're't","dsw":[0,9],"offset":2,"t_ms":2300,"source":"editor"}
{"pass":8,"text":"dian're'ta","dsw":[0,10],"offset":1,"t_ms":2500,"source":"editor"}
{"pass":9,"text":"dian're'tan","dsw":[0,11],"offset":1,"t_ms":2700,"source":"editor"}
{"pass":10,"text":"电热毯","dsw":[0,3],"offset":-8,"t_ms":2900,"source":"editor"}
"#;

#[test]
fn analyze_reports_resolved_incoherences() {
    let dir = temp_dir("diagnostics");
    write(&dir.join("keys.jsonl"), DIANRETAN_KEYS);
    write(&dir.join("text.jsonl"), DIANRETAN_TEXT);
    write(&dir.join("lexicon.txt"), FIXTURE_LEXICON);

    let hybrid = dir.join("hybrid");
    run_ok(bin().args([
        "hybridize",
        "--in-keys",
        dir.join("keys.jsonl").to_str().unwrap(),
        "--in-text",
        dir.join("text.jsonl").to_str().unwrap(),
        "--out",
        hybrid.to_str().unwrap(),
    ]));

    let analyzed = dir.join("analyzed");
    run_ok(bin().args([
        "analyze",
        "--in-dual",
        hybrid.join("dual.jsonl").to_str().unwrap(),
        "--lexicon",
        dir.join("lexicon.txt").to_str().unwrap(),
        "--out",
        analyzed.to_str().unwrap(),
    ]));

    let diagnostics = read(&analyzed.join("diagnostics.json"));
    assert!(diagnostics.contains("\"syllabic_division\": 2"), "{diagnostics}");
    assert!(diagnostics.contains("\"ime_confirmation\": 1"), "{diagnostics}");
    assert!(diagnostics.contains("\"unresolved\": 0"), "{diagnostics}");

    let dual = read(&hybrid.join("dual.jsonl"));
    assert!(dual.contains("dian're'tan"), "{dual}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_codes_distinguish_failure_stages() {
    let dir = temp_dir("exitcodes");
    write(&dir.join("garbage.jsonl"), "this is not a log\n");
    write(&dir.join("keys.jsonl"), DIANRETAN_KEYS);
    write(&dir.join("text.jsonl"), DIANRETAN_TEXT);
    // Text log cut short: the session keeps typing after the last snapshot.
    let truncated: String = DIANRETAN_TEXT.lines().take(3).map(|l| format!("{l}\n")).collect();
    write(&dir.join("short.jsonl"), &truncated);
    // A confirmation annotation with no letters behind it.
    write(
        &dir.join("broken-dual.jsonl"),
        r#"{"id":0,"kind":"down","key":"SPACEBAR","position":2,"t_ms":100,"status":"resolved","rule":"ime_confirmation","ime":{"text":"马","pinyin":"ma","start":0,"end":1}}
"#,
    );

    // Parse failure.
    let out = bin()
        .args([
            "hybridize",
            "--in-keys",
            dir.join("garbage.jsonl").to_str().unwrap(),
            "--in-text",
            dir.join("text.jsonl").to_str().unwrap(),
            "--out",
            dir.join("o1").to_str().unwrap(),
        ])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(10), "{}", String::from_utf8_lossy(&out.stderr));

    // Integrity failure: mismatched sessions.
    let out = bin()
        .args([
            "hybridize",
            "--in-keys",
            dir.join("keys.jsonl").to_str().unwrap(),
            "--in-text",
            dir.join("short.jsonl").to_str().unwrap(),
            "--out",
            dir.join("o2").to_str().unwrap(),
        ])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(11), "{}", String::from_utf8_lossy(&out.stderr));

    // Analysis failure.
    let out = bin()
        .args([
            "analyze",
            "--in-dual",
            dir.join("broken-dual.jsonl").to_str().unwrap(),
            "--out",
            dir.join("o3").to_str().unwrap(),
        ])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(13), "{}", String::from_utf8_lossy(&out.stderr));

    // Script failure.
    write(&dir.join("bad.script"), "frobnicate 1 2 3\n");
    let out = bin()
        .args([
            "simulate",
            dir.join("bad.script").to_str().unwrap(),
            "--out",
            dir.join("o4").to_str().unwrap(),
        ])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(15), "{}", String::from_utf8_lossy(&out.stderr));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn report_summarizes_alignment_and_metrics() {
    let dir = temp_dir("report");
    write(&dir.join("keys.jsonl"), DIANRETAN_KEYS);
    write(&dir.join("text.jsonl"), DIANRETAN_TEXT);
    write(&dir.join("lexicon.txt"), FIXTURE_LEXICON);

    let out_dir = dir.join("out");
    run_ok(bin().args([
        "report",
        "--in-keys",
        dir.join("keys.jsonl").to_str().unwrap(),
        "--in-text",
        dir.join("text.jsonl").to_str().unwrap(),
        "--lexicon",
        dir.join("lexicon.txt").to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]));
    let summary = read(&out_dir.join("summary.txt"));
    assert!(summary.contains("resolved syllabic_division: 2"), "{summary}");
    assert!(summary.contains("resolved ime_confirmation: 1"), "{summary}");
    assert!(summary.contains("latin_letters"), "{summary}");
    std::fs::remove_dir_all(&dir).ok();
}
