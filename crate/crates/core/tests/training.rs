use offlang::corpus::{Corpus, Language, Split};
use offlang::encoder::{build_vocab, EncoderModel};
use offlang::eval::{evaluate, train_and_evaluate};
use offlang::synth::{separable_corpus, toy_corpus, toy_encoder_config};
use offlang::train::{train_dual, train_single, Classifier, TrainConfig};

fn config(seed: u64) -> TrainConfig {
    TrainConfig {
        learning_rate: 1e-3,
        batch_size: 8,
        seed,
        ..TrainConfig::for_language(Language::En)
    }
}

fn snapshot(model: &EncoderModel) -> Vec<Vec<f64>> {
    model.named_tensors().into_iter().map(|(_, t)| t.iter().copied().collect()).collect()
}

#[test]
fn loss_decreases_on_separable_data() {
    let corpus = toy_corpus(3);
    let (outcome, _) = train_and_evaluate(&corpus, &corpus, &toy_encoder_config(3), &config(3)).unwrap();
    let trace = &outcome.loss_trace;
    assert!(trace.last().unwrap() < &(trace[0] * 0.5), "{trace:?}");
}

#[test]
fn training_is_deterministic_per_seed() {
    let corpus = toy_corpus(4);
    let run = || train_and_evaluate(&corpus, &corpus, &toy_encoder_config(4), &config(4)).unwrap();
    let (a, ra) = run();
    let (b, rb) = run();
    assert_eq!(a.loss_trace, b.loss_trace);
    assert_eq!(ra, rb);
    assert_eq!(a.classifier.to_checkpoint().to_json(), b.classifier.to_checkpoint().to_json());
}

#[test]
fn dual_with_duplicated_encoder_matches_single() {
    let train = toy_corpus(6);
    let test = separable_corpus(200, 1006, "test-").with_split(Split::Test);
    let enc_cfg = toy_encoder_config(6);
    let vocab = build_vocab(&train, enc_cfg.vocab_cap).unwrap();
    let base = EncoderModel::new(enc_cfg, vocab.len()).unwrap();
    let single = train_single(&train, &base, &vocab, &config(6)).unwrap();
    let tuned = single.classifier.encoders[0].clone();
    let single_acc = accuracy(&single.classifier, &test);

    let before = snapshot(&tuned);
    let dual = train_dual(&train, &tuned, &tuned.clone(), &vocab, &config(6)).unwrap();
    assert_eq!(dual.classifier.feature_dim(), 2 * tuned.hidden_size());
    for enc in &dual.classifier.encoders {
        assert_eq!(snapshot(enc), before, "frozen encoder changed");
    }
    let dual_acc = accuracy(&dual.classifier, &test);
    assert!((dual_acc - single_acc).abs() <= 0.02, "single {single_acc} dual {dual_acc}");
}

fn accuracy(model: &Classifier, test: &Corpus) -> f64 {
    let pred = model.predict_corpus(test).unwrap();
    evaluate(&pred, &test.labels()).unwrap().accuracy
}
