//! Replays the checked-in fuzz corpus through the decoders on stable, with
//! the same assertions the fuzz targets make.

use std::fs;
use std::path::PathBuf;

use fairpay_core::format::{InstanceFile, ResultFile, RewardDescriptor};
use fairpay_core::harness::{read_csv, write_csv, SweepSpec};
use fairpay_core::solvers::brute_force;
use fairpay_core::{AgentSet, ModeSpec};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut files: Vec<PathBuf> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| entry.unwrap().path())
        .collect();
    files.sort();
    assert!(!files.is_empty(), "no seeds in {}", dir.display());
    files
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect()
}

#[test]
fn instance_seeds_parse_and_round_trip() {
    for (path, text) in seeds("instance_file") {
        let inst = InstanceFile::from_json(&text)
            .and_then(|f| f.to_instance())
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = InstanceFile::from_json(&InstanceFile::from_instance(&inst).to_json())
            .unwrap()
            .to_instance()
            .unwrap();
        assert_eq!(again, inst);
        if inst.n() <= 8 {
            for spec in [
                ModeSpec::Unconstrained,
                ModeSpec::Nd,
                ModeSpec::BetaNd { beta: 2.0 },
            ] {
                assert!(brute_force(&inst, spec).unwrap().best.utility >= 0.0);
            }
        }
    }
}

#[test]
fn result_seeds_parse() {
    for (path, text) in seeds("result_file") {
        let file =
            ResultFile::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(ResultFile::from_json(&file.to_json()).unwrap(), file);
    }
}

#[test]
fn reward_seeds_evaluate_in_range() {
    for (path, text) in seeds("reward_descriptor") {
        let f = RewardDescriptor::from_json(&text)
            .and_then(|d| d.build())
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        for mask in 0..1u64 << f.n().min(10) {
            let v = f.eval(&AgentSet::from_mask(mask)).unwrap();
            assert!((0.0..=1.0).contains(&v));
        }
    }
}

#[test]
fn sweep_config_seeds_parse() {
    for (path, text) in seeds("sweep_config") {
        let spec =
            SweepSpec::from_toml(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(!spec.axis().unwrap().1.is_empty());
    }
}

#[test]
fn csv_seeds_round_trip() {
    for (path, text) in seeds("sweep_csv") {
        let records =
            read_csv(text.as_bytes()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let mut out = Vec::new();
        write_csv(&records, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }
}

#[test]
fn malformed_inputs_are_errors_not_panics() {
    let junk = [
        "",
        "{",
        "[]",
        "null",
        "{\"version\":\"1\"}",
        "\u{0}",
        "family = 3",
        "a,b\n",
    ];
    for text in junk {
        assert!(InstanceFile::from_json(text).is_err());
        assert!(ResultFile::from_json(text).is_err());
        assert!(RewardDescriptor::from_json(text).is_err());
        assert!(SweepSpec::from_toml(text).is_err());
    }
    // structurally valid but inconsistent
    let huge =
        r#"{"version":"1","n":40,"costs":[],"reward":{"kind":"explicit","n":40,"table":[]}}"#;
    assert!(InstanceFile::from_json(huge)
        .unwrap()
        .to_instance()
        .is_err());
    let neg = r#"{"kind":"coverage","elements":[{"weight":-1}],"covers":[[0]]}"#;
    assert!(RewardDescriptor::from_json(neg).unwrap().build().is_err());
    let out_of_range = r#"{"kind":"coverage","elements":[{"weight":0.5}],"covers":[[3]]}"#;
    assert!(RewardDescriptor::from_json(out_of_range)
        .unwrap()
        .build()
        .is_err());
}
