use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use topic_floor::classify::{
    bootstrap_ci, evaluate, train, BootstrapConfig, FeatureSpec, LinearModel, TrainHyper,
};
use topic_floor::corpus::{split_corpus, SplitSpec};
use topic_floor::synth::planted_token_corpus;

#[test]
fn planted_token_is_learned() {
    let c = planted_token_corpus(1000, "zzz", 1);
    let (tr, _, te) = split_corpus(&c, &SplitSpec::parse("0.8,0.1,0.1", 1).unwrap()).unwrap();
    let model = train(&tr, &FeatureSpec::default(), &TrainHyper::default()).unwrap();
    let r = evaluate(&model, &te, &BootstrapConfig::default(), "u-u").unwrap();
    assert!(r.accuracy >= 0.99, "accuracy {}", r.accuracy);
    assert!(r.ci_low <= r.accuracy && r.accuracy <= r.ci_high);
    assert!(model.loss_history.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn model_json_round_trip() {
    let c = planted_token_corpus(60, "zzz", 2);
    let model = train(&c, &FeatureSpec::default(), &TrainHyper { epochs: 20, ..TrainHyper::default() }).unwrap();
    let back = LinearModel::from_json(&model.to_json()).unwrap();
    assert_eq!(back, model);
}

#[test]
fn interval_narrows_with_more_items() {
    let cfg = BootstrapConfig {
        samples: 500,
        level: 0.95,
        seed: 3,
    };
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let width = |n: usize, rng: &mut ChaCha20Rng| {
        let items: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.7)).collect();
        let (lo, hi) = bootstrap_ci(&items, &cfg).unwrap();
        hi - lo
    };
    let w100 = width(100, &mut rng);
    let w10k = width(10_000, &mut rng);
    // Width scales like 1/sqrt(n): a factor of about 10 here.
    assert!(w10k < w100 / 5.0, "{w100} vs {w10k}");
}

#[test]
fn interval_is_seeded() {
    let items: Vec<bool> = (0..300).map(|i| i % 3 != 0).collect();
    let cfg = BootstrapConfig { seed: 9, ..BootstrapConfig::default() };
    assert_eq!(bootstrap_ci(&items, &cfg).unwrap(), bootstrap_ci(&items, &cfg).unwrap());
}
