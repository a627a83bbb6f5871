//! Writing a game by hand: a one-shot entry decision where the entrant believes the
//! incumbent fights with a fixed probability. The document is validated, saved, loaded and
//! solved.

use berknash::bundles::binary::binary_model;
use berknash::bundles::ExampleBundle;
use berknash::document::{document_json, read_document};
use berknash::equilibrium::{solve, EquilibriumConfig};
use berknash::game::{single_agent, validate_game};

fn main() -> berknash::Result<()> {
    // states: the incumbent fights (prob 0.3) or accommodates
    let game = single_agent(
        vec!["fight".into(), "accommodate".into()],
        vec![0.3, 0.7],
        vec!["stay out".into(), "enter".into()],
        vec!["accommodated".into(), "fought".into()],
        |x, w| if x == 1 && w == 0 { 1 } else { 0 },
        |x, y| match (x, y) {
            (0, _) => 0.0,
            (_, 0) => 1.0,
            _ => -2.0,
        },
    );
    assert!(validate_game(&game).is_empty());
    // θ = probability of being fought, for each action; staying out is never fought
    let points: Vec<Vec<f64>> = [0.1, 0.3, 0.5, 0.7].iter().map(|p| vec![0.0, *p]).collect();
    let doc = ExampleBundle {
        name: "entry".into(),
        game,
        models: vec![binary_model(points)],
        analogy: None,
        true_parameter: Some(vec![0.0, 0.3]),
        expected: vec![],
    };
    let text = document_json(&doc)?;
    println!("document is {} bytes", text.len());
    let back = read_document(text.as_bytes())?;
    let out = solve(&back.game, &back.models, &EquilibriumConfig::default())?;
    for c in &out.certificates {
        println!("equilibrium {:?}, belief {:?}", c.strategy.0[0][0], c.players[0].belief);
    }
    Ok(())
}
