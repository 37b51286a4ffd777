use proptest::prelude::*;

use offlang::augment::{augment_corpus, AugmentOptions, LangCode, MockProvider, PivotSet, Translator};
use offlang::corpus::{
    corpus_stats, labeled_to_tsv, parse_labeled_tsv, Corpus, Label, LabeledExample, Language, ScoredExample, Split,
};
use offlang::eval::{evaluate, ConfusionMatrix};
use offlang::normalize::Normalizer;
use offlang::weaklabel::{build_weak_corpus, WeakLabelConfig, WeakLabelError};

fn label() -> impl Strategy<Value = Label> {
    prop_oneof![Just(Label::Off), Just(Label::Not)]
}

fn paired_labels() -> impl Strategy<Value = (Vec<Label>, Vec<Label>)> {
    (1usize..200).prop_flat_map(|n| (prop::collection::vec(label(), n), prop::collection::vec(label(), n)))
}

fn corpus(language: Language) -> impl Strategy<Value = Corpus> {
    prop::collection::vec(("[a-zA-Zæøå@#!😂 ]{0,30}[a-z]", label()), 1..30).prop_map(move |rows| {
        let examples = rows
            .into_iter()
            .enumerate()
            .map(|(i, (text, label))| LabeledExample::new(format!("r{i}"), text.trim(), label).unwrap())
            .collect();
        Corpus::new(language, Split::Train, examples).unwrap()
    })
}

proptest! {
    #[test]
    fn macro_f1_symmetric_under_relabeling((pred, gold) in paired_labels()) {
        let a = evaluate(&pred, &gold).unwrap();
        let flip = |v: &[Label]| v.iter().map(|l| l.flipped()).collect::<Vec<_>>();
        let b = evaluate(&flip(&pred), &flip(&gold)).unwrap();
        prop_assert!((a.macro_f1 - b.macro_f1).abs() < 1e-12);
        prop_assert!((a.accuracy - b.accuracy).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a.macro_f1));
    }

    #[test]
    fn perfect_accuracy_iff_diagonal((pred, gold) in paired_labels()) {
        let report = evaluate(&pred, &gold).unwrap();
        let confusion = ConfusionMatrix::from_labels(&pred, &gold);
        prop_assert_eq!(report.accuracy == 1.0, confusion.is_diagonal());
        prop_assert_eq!(confusion.total(), pred.len());
    }

    #[test]
    fn tsv_roundtrip(c in corpus(Language::Tr)) {
        let text = labeled_to_tsv(&c).unwrap();
        prop_assert_eq!(parse_labeled_tsv(&text, Language::Tr, Split::Train).unwrap(), c);
    }

    #[test]
    fn augmentation_preserves_labels_and_scales_counts(c in corpus(Language::Da)) {
        let provider = MockProvider::new();
        let translator = Translator::new(&provider);
        let pivots = PivotSet::parse("en,fr,de", &LangCode::from(Language::Da)).unwrap();
        let out = augment_corpus(&c, &pivots, &translator, AugmentOptions::default()).unwrap();
        let (before, after) = (corpus_stats(&c), corpus_stats(&out));
        prop_assert_eq!(after.off_count, 4 * before.off_count);
        prop_assert_eq!(after.not_count, 4 * before.not_count);
        // each original is followed by its pivot samples, same label
        for (orig, group) in c.examples().iter().zip(out.examples().chunks(4)) {
            prop_assert_eq!(&group[0], orig);
            for e in &group[1..] {
                prop_assert_eq!(e.label, orig.label);
                prop_assert!(e.text.starts_with(&orig.text));
            }
        }
    }

    #[test]
    fn normalization_is_idempotent(s in "\\PC{0,60}") {
        let n = Normalizer::bundled();
        let once = n.normalize(&s);
        prop_assert_eq!(n.normalize(&once), once);
    }

    #[test]
    fn weak_corpus_balanced_and_strict(
        confidences in prop::collection::vec(0.0f64..=1.0, 0..300),
        k in 1usize..40,
        seed in any::<u64>(),
    ) {
        let scored: Vec<ScoredExample> = confidences
            .iter()
            .enumerate()
            .map(|(i, &confidence)| ScoredExample { id: format!("s{i}"), text: format!("t {i}"), confidence })
            .collect();
        let config = WeakLabelConfig { per_class_count: k, seed, ..Default::default() };
        let off = confidences.iter().filter(|&&c| c > config.hi_threshold).count();
        let not = confidences.iter().filter(|&&c| c < config.lo_threshold).count();
        match build_weak_corpus(&scored, &config) {
            Ok(out) => {
                prop_assert!(off >= k && not >= k);
                let stats = corpus_stats(&out);
                prop_assert_eq!((stats.off_count, stats.not_count), (k, k));
            }
            Err(WeakLabelError::InsufficientClassSamples { .. }) => prop_assert!(off < k || not < k),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}
