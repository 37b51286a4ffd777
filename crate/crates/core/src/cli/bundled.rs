//! Mini-corpus shipped inside the binary for offline runs.

use crate::corpus::{parse_labeled_tsv, Corpus, CorpusError, Language, Split};

macro_rules! asset {
    ($name:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/assets/minicorpus/", $name))
    };
}

pub fn train_tsv(language: Language) -> &'static str {
    match language {
        Language::En => asset!("en_train.tsv"),
        Language::Da => asset!("da_train.tsv"),
        Language::Tr => asset!("tr_train.tsv"),
        Language::Ar => asset!("ar_train.tsv"),
        Language::El => asset!("el_train.tsv"),
    }
}

pub fn test_tsv(language: Language) -> &'static str {
    match language {
        Language::En => asset!("en_test.tsv"),
        Language::Da => asset!("da_test.tsv"),
        Language::Tr => asset!("tr_test.tsv"),
        Language::Ar => asset!("ar_test.tsv"),
        Language::El => asset!("el_test.tsv"),
    }
}

pub fn load(language: Language, split: Split) -> Result<Corpus, CorpusError> {
    let tsv = match split {
        Split::Test => test_tsv(language),
        _ => train_tsv(language),
    };
    parse_labeled_tsv(tsv, language, split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::labeled_to_tsv;
    use crate::synth::mini_corpus;

    #[test]
    fn assets_match_generator() {
        for l in Language::ALL {
            let (train, test) = mini_corpus(l);
            assert_eq!(labeled_to_tsv(&train).unwrap(), train_tsv(l), "{l} train");
            assert_eq!(labeled_to_tsv(&test).unwrap(), test_tsv(l), "{l} test");
            assert_eq!(load(l, Split::Test).unwrap().len(), test.len());
        }
    }
}
