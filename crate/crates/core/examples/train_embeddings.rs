//! Train skip-gram embeddings on a synthetic corpus and list the nearest
//! neighbours of a few tokens.
//!
//!     cargo run --release --example train_embeddings

use clinsearch::build::tokenize_corpus;
use clinsearch::embedding::{SkipGramTrainer, TrainingConfig};
use clinsearch::synth::{generate, SynthConfig};
use clinsearch::text::TextPipeline;

fn cos(a: &[f32], b: &[f32]) -> f32 {
    let dot: f32 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    dot / (a.iter().map(|x| x * x).sum::<f32>().sqrt() * b.iter().map(|x| x * x).sum::<f32>().sqrt())
}

fn main() -> clinsearch::Result<()> {
    let corpus = generate(&SynthConfig {
        documents: 600,
        vocabulary: 150,
        ..SynthConfig::default()
    });
    let tokenized = tokenize_corpus(&corpus.store, &TextPipeline::default());
    let config = TrainingConfig {
        dim: 32,
        window: 10,
        epochs: 5,
        ..TrainingConfig::default()
    };
    let outcome = SkipGramTrainer::new(config)?.train_with(&tokenized.streams(), |epoch, loss| {
        println!("epoch {} loss {loss:.5}", epoch + 1);
    })?;

    let matrix = &outcome.matrix;
    let lexicon = &tokenized.lexicon;
    for word in corpus.words.iter().take(3) {
        let Some(tid) = lexicon.tid(word) else { continue };
        let v = matrix.get(tid).expect("trained token");
        let mut near: Vec<(f32, &str)> = matrix
            .iter()
            .filter(|(other, _)| *other != tid)
            .map(|(other, u)| (cos(v, u), lexicon.token(other).unwrap_or("?")))
            .collect();
        near.sort_by(|a, b| b.0.total_cmp(&a.0));
        let shown: Vec<String> = near.iter().take(5).map(|(c, t)| format!("{t} {c:.2}")).collect();
        println!("{word}: {}", shown.join(", "));
    }
    Ok(())
}
