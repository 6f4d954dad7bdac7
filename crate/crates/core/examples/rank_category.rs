//! Score hand-made candidates the way one result tab does: min-max
//! normalization, per-tab boosts, the zero rule and the age penalty.
//!
//!     cargo run --example rank_category

use clinsearch::ingest::PartialDate;
use clinsearch::ranking::{date_score, score_category, BoostingFactors, Candidate, PublicationCategory, RawSubscores};

fn main() -> clinsearch::Result<()> {
    let rows = [
        // pmid, cosine, title hit, date, jif
        (101, 0.92, 1.0, PartialDate::new(2018, Some(3), None)?, 51.3),
        (102, 0.85, 1.0, PartialDate::new(2012, None, None)?, 6.2),
        (103, 0.60, 1.0, PartialDate::new(1996, Some(11), Some(2))?, 23.1),
        (104, 0.77, 0.0, PartialDate::new(2016, Some(1), Some(9))?, 27.1),
        (105, 0.81, 1.0, PartialDate::new(2017, Some(5), Some(30))?, 0.0),
    ];
    let candidates: Vec<Candidate> = rows
        .iter()
        .map(|(pmid, semantic, title_count, date, jif)| Candidate {
            pmid: *pmid,
            raw: RawSubscores {
                semantic: *semantic,
                title_count: *title_count,
                date: date_score(date),
                journal: *jif,
            },
            pub_year: date.year(),
        })
        .collect();

    for category in PublicationCategory::ALL {
        let boosts = BoostingFactors::defaults_for(category);
        println!("{category} boosts {:?}", boosts.as_array());
        for r in score_category(category, &candidates, &boosts, 2019) {
            let n = r.normalized;
            println!(
                "  {} relevance {:>6.3}  norm [{:.2} {:.2} {:.2} {:.2}]  raw date {}",
                r.pmid, r.relevance, n[0], n[1], n[2], n[3], r.raw.date
            );
        }
    }
    println!("\n104 has no title hit and 105 an unranked journal, so both score 0.");
    println!("103 is over twenty years old and keeps a tenth of its score.");
    Ok(())
}
