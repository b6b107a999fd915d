//! Replays the committed fixture set through a full evolve run.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use autohd_core::bench::{load_dataset, BenchConfig};
use autohd_core::domains::DomainId;
use autohd_core::evolution::{evolve, Archive, EvolutionConfig, Evaluator};
use autohd_core::search::Algorithm;
use autohd_gateway::{network_calls, ChatClient, FixtureClient, LlmGenerator, ModelEndpoint, ScriptedModel, Secret};

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/evolve_cube")
}

fn run(generator: &mut LlmGenerator) -> Archive {
    let validation = load_dataset(&fixture_dir().join("validation.jsonl"), DomainId::Cube2x2).unwrap();
    let evaluator = Evaluator::new(validation, BenchConfig::new(Algorithm::Astar));
    evolve(generator, &evaluator, EvolutionConfig::new(4, 2, 7)).unwrap()
}

#[test]
fn fixture_replay_matches_the_recorded_archive_without_network() {
    let before = network_calls();
    let client = Arc::new(FixtureClient::new(fixture_dir().join("responses")).unwrap());
    let mut generator = LlmGenerator::new(client.clone());
    let archive = run(&mut generator);
    assert_eq!(network_calls(), before);
    assert_eq!(client.served(), generator.prompt_log().len());
    let recorded = fs::read_to_string(fixture_dir().join("archive.json")).unwrap();
    assert_eq!(archive.to_json(), recorded);
    assert_eq!(archive.generations.len(), 3);
    assert!(archive.generations.iter().flat_map(|g| &g.members).any(|c| c.lineage.repaired));
}

#[test]
fn scripted_model_and_its_recording_agree() {
    let mut live = LlmGenerator::new(Arc::new(ScriptedModel::new()));
    let mut replay = LlmGenerator::new(Arc::new(FixtureClient::new(fixture_dir().join("responses")).unwrap()));
    assert_eq!(run(&mut live), run(&mut replay));
    assert_eq!(live.prompt_log(), replay.prompt_log());
}

#[test]
fn api_key_never_reaches_artifacts() {
    const KEY: &str = "sk-hygiene-0b7d2e51c9";
    let endpoint = ModelEndpoint { api_key: Secret::new(KEY), ..ModelEndpoint::default() };
    let client = ChatClient::new(endpoint.clone());
    let mut generator = LlmGenerator::new(Arc::new(FixtureClient::new(fixture_dir().join("responses")).unwrap()));
    let archive = run(&mut generator);
    let artifacts = [
        serde_json::to_string(&endpoint).unwrap(),
        format!("{endpoint:?}"),
        format!("{:?}", client.endpoint()),
        archive.to_json(),
        serde_json::to_string(generator.prompt_log()).unwrap(),
    ];
    for a in &artifacts {
        assert!(!a.contains(KEY));
    }
    for entry in fs::read_dir(fixture_dir().join("responses")).unwrap() {
        let bytes = fs::read(entry.unwrap().path()).unwrap();
        assert!(!bytes.windows(KEY.len()).any(|w| w == KEY.as_bytes()));
    }
}
