//! Queries the composite library and shows the reuse decision.

use qodesign::retrieval::{decide_match, MatchDecision, RetrievalIndex};
use qodesign::toolbox::Toolbox;

fn main() {
    let tb = Toolbox::bundled();
    let index = RetrievalIndex::from_composites(tb.composites());
    let queries = std::env::args().skip(1).collect::<Vec<_>>();
    let queries = if queries.is_empty() {
        vec![
            "Franson interferometer energy-time entanglement".to_string(),
            "rubidium EIT".to_string(),
            "Hong-Ou-Mandel Interferometer Two-photon interference of Type-II SPDC photon pairs on a balanced beam splitter".to_string(),
        ]
    } else {
        queries
    };
    for q in &queries {
        println!("{q}");
        let hits = index.query(q, 3);
        for h in &hits {
            println!("  {:.4}  {} v{}", h.similarity, h.name, h.version);
        }
        match decide_match(&hits) {
            MatchDecision::ExistingMatch { best, choices } => println!("  reuse {} ({choices:?})", best.name),
            MatchDecision::NoMatch => println!("  no match, generate a new design"),
        }
    }
}
