//! Replays the fuzz seed corpora through the parsers on stable, plus
//! randomized mutations of those seeds. The properties match the fuzz
//! targets: no panics, and anything accepted survives a write and re-read.

use std::fs;
use std::path::PathBuf;

use kpz_tail::cli::ExperimentConfig;
use kpz_tail::io::{field_from_csv, field_to_csv, potential_from_csv, potential_to_csv, GridDescriptor};
use proptest::prelude::*;

const DESCRIPTOR: GridDescriptor = GridDescriptor {
    half_width: 1.0,
    n_points: 5,
    t_start: 0.0,
    t_end: 1.0,
    n_steps: 2,
};

fn corpus(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<PathBuf> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files.iter().map(|p| fs::read_to_string(p).unwrap()).collect()
}

fn field(text: &str) -> bool {
    match field_from_csv(&DESCRIPTOR, text) {
        Ok(f) => {
            let again = field_from_csv(&DESCRIPTOR, &field_to_csv(&f)).expect("round trip");
            assert_eq!(again.values().len(), f.values().len());
            true
        }
        Err(_) => false,
    }
}

fn potential(text: &str) -> bool {
    match potential_from_csv(text) {
        Ok(p) => {
            let again = potential_from_csv(&potential_to_csv(&p)).expect("round trip");
            assert_eq!(again.values().len(), p.values().len());
            true
        }
        Err(_) => false,
    }
}

fn descriptor(text: &str) -> bool {
    match GridDescriptor::from_json(text) {
        Ok(d) => {
            let _ = d.grids();
            assert_eq!(GridDescriptor::from_json(&d.to_json()).unwrap(), d);
            true
        }
        Err(_) => false,
    }
}

fn config(text: &str) -> bool {
    match ExperimentConfig::from_json(text) {
        Ok(cfg) => {
            for command in ["tail-law", "selftest", "rate"] {
                let _ = cfg.validate(command);
            }
            true
        }
        Err(_) => false,
    }
}

#[test]
fn seed_corpora() {
    let accepted = |target: &str, f: fn(&str) -> bool| corpus(target).iter().filter(|t| f(t)).count();
    assert_eq!(accepted("field_csv", field), 1);
    assert_eq!(accepted("potential_csv", potential), 1);
    assert_eq!(accepted("descriptor_json", descriptor), 3);
    assert_eq!(accepted("config_json", config), 4);
    // The oversized descriptor parses but refuses to build grids.
    let huge = corpus("descriptor_json")
        .into_iter()
        .find(|t| t.contains("1e+300") || t.contains("1e300"))
        .unwrap();
    assert!(GridDescriptor::from_json(&huge).unwrap().grids().is_err());
}

/// A seed with a few byte-level edits at random positions.
fn mutated(seeds: Vec<String>) -> impl Strategy<Value = String> {
    (
        0..seeds.len(),
        proptest::collection::vec((any::<prop::sample::Index>(), any::<u8>(), 0u8..3), 0..6),
    )
        .prop_map(move |(which, edits)| {
            let mut bytes = seeds[which].clone().into_bytes();
            for (at, byte, kind) in edits {
                let i = at.index(bytes.len() + 1);
                match kind {
                    0 => bytes.insert(i, byte),
                    1 if i < bytes.len() => {
                        bytes.remove(i);
                    }
                    _ if i < bytes.len() => bytes[i] = byte,
                    _ => {}
                }
            }
            String::from_utf8_lossy(&bytes).into_owned()
        })
}

proptest! {
    #[test]
    fn mutated_fields(text in mutated(corpus("field_csv"))) {
        field(&text);
    }

    #[test]
    fn mutated_potentials(text in mutated(corpus("potential_csv"))) {
        potential(&text);
    }

    #[test]
    fn mutated_descriptors(text in mutated(corpus("descriptor_json"))) {
        descriptor(&text);
    }

    #[test]
    fn mutated_configs(text in mutated(corpus("config_json"))) {
        config(&text);
    }

    #[test]
    fn arbitrary_text(text in ".{0,200}") {
        field(&text);
        potential(&text);
        descriptor(&text);
        config(&text);
    }
}
