//! Tokenize, drop stopwords, normalize and intern into a lexicon.
//!
//!     cargo run --example text_pipeline

use clinsearch::embedding::idf_weight;
use clinsearch::text::{Lexicon, StopwordList, TextPipeline};

fn main() -> clinsearch::Result<()> {
    let pipeline = TextPipeline::new(StopwordList::parse("the\nof\nin\nand\nafter\n"));
    let title = "Depression after Stroke: the ASPECTS of Recovery in  Older Adults";
    println!("input:      {title:?}");
    println!("normalized: {:?}", pipeline.normalized_tokens(title));

    let docs = [
        ("Depression after stroke", "Post-stroke depression is common."),
        ("Thrombectomy for large vessel stroke", "Endovascular therapy in the ASPECTS trial."),
        ("Depression in primary care", "Screening for depression."),
    ];
    let mut lexicon = Lexicon::new();
    for (title, abs) in docs {
        let (t, a) = pipeline.add_document(&mut lexicon, title, abs);
        println!("title tids {t:?}, abstract tids {a:?}");
    }
    println!("\n{} documents, {} tokens", lexicon.corpus_size(), lexicon.len());
    for (tid, token) in lexicon.iter() {
        let df = lexicon.doc_freq(tid).unwrap_or(0);
        println!("{tid:>3} {token:<14} df {df} idf {:.4}", idf_weight(tid, &lexicon)?);
    }
    // Unknown tokens have no TID and are simply dropped.
    println!("\nquery tids: {:?}", pipeline.text_to_tids("stroke zebrafish depression", &lexicon));
    Ok(())
}
