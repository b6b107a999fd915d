//! Regenerates the offline evolve fixture set:
//! `cargo run -p autohd-gateway --example record_fixtures -- <dir>`.

use std::fs;
use std::path::PathBuf;

use autohd_core::bench::{gen_dataset, write_dataset, BenchConfig, DatasetSpec};
use autohd_core::domains::DomainId;
use autohd_core::evolution::{evolve, EvolutionConfig, Evaluator};
use autohd_core::search::Algorithm;
use autohd_gateway::{LlmGenerator, Recorder, ScriptedModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).ok_or("usage: record_fixtures <dir>")?);
    let responses = dir.join("responses");
    fs::create_dir_all(&responses)?;

    let spec = DatasetSpec { buckets: vec![(1, 3), (2, 3), (3, 2), (4, 2)], ..DatasetSpec::default_for(DomainId::Cube2x2) };
    let validation = gen_dataset(DomainId::Cube2x2, &spec, 7)?;
    write_dataset(fs::File::create(dir.join("validation.jsonl"))?, &validation)?;

    let recorder = Recorder::new(ScriptedModel::new(), &responses)?;
    let mut generator = LlmGenerator::new(std::sync::Arc::new(recorder));
    let evaluator = Evaluator::new(validation, BenchConfig::new(Algorithm::Astar));
    let archive = evolve(&mut generator, &evaluator, EvolutionConfig::new(4, 2, 7))?;
    fs::write(dir.join("archive.json"), archive.to_json())?;
    println!("{archive}");
    println!("{} prompts recorded", generator.prompt_log().len());
    Ok(())
}
