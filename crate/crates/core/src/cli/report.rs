//! Aggregate report tables in the layouts of the published results.

use std::fmt::Write;

use crate::corpus::Language;
use crate::eval::{EvalReport, DUAL, WITHOUT_AUGMENTATION, WITHOUT_CLEAN, WITHOUT_WEAK, WITH_AUGMENTATION};

use super::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableLayout {
    /// One row of macro-F1 per language, columns Turkish, Arabic, Greek,
    /// Danish, English.
    Table2 { system: String },
    /// English ablation rows: weak-only, clean-only, dual.
    Table3,
    /// Augmentation ablation rows: without, with.
    Table4,
}

pub const TABLE2_LANGUAGES: [Language; 5] =
    [Language::Tr, Language::Ar, Language::El, Language::Da, Language::En];

fn language_name(l: Language) -> &'static str {
    match l {
        Language::En => "English",
        Language::Da => "Danish",
        Language::Tr => "Turkish",
        Language::Ar => "Arabic",
        Language::El => "Greek",
    }
}

impl TableLayout {
    pub fn arity(&self) -> usize {
        match self {
            TableLayout::Table2 { .. } => TABLE2_LANGUAGES.len(),
            TableLayout::Table3 => 3,
            TableLayout::Table4 => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TableLayout::Table2 { .. } => "table2",
            TableLayout::Table3 => "table3",
            TableLayout::Table4 => "table4",
        }
    }
}

/// TSV with values rounded to four decimals.
pub fn emit_report_table(reports: &[EvalReport], layout: &TableLayout) -> Result<String, CliError> {
    if reports.len() != layout.arity() {
        return Err(CliError::ArityMismatch {
            layout: layout.name(),
            expected: layout.arity(),
            found: reports.len(),
        });
    }
    let mut out = String::new();
    match layout {
        TableLayout::Table2 { system } => {
            out.push_str("System");
            for l in TABLE2_LANGUAGES {
                write!(out, "\t{}", language_name(l)).unwrap();
            }
            write!(out, "\n{system}").unwrap();
            for r in reports {
                write!(out, "\t{:.4}", r.macro_f1).unwrap();
            }
            out.push('\n');
        }
        TableLayout::Table3 | TableLayout::Table4 => {
            let labels: &[&str] = if *layout == TableLayout::Table3 {
                &[WITHOUT_CLEAN, WITHOUT_WEAK, DUAL]
            } else {
                &[WITHOUT_AUGMENTATION, WITH_AUGMENTATION]
            };
            out.push_str("System\tMacro-F1\tAccuracy\n");
            for (label, r) in labels.iter().zip(reports) {
                writeln!(out, "{label}\t{:.4}\t{:.4}", r.macro_f1, r.accuracy).unwrap();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Label::{Not, Off};
    use crate::eval::evaluate;

    fn report() -> EvalReport {
        evaluate(&[Off, Not, Not], &[Off, Off, Not]).unwrap()
    }

    #[test]
    fn table4_rows() {
        let t = emit_report_table(&[report(), report()], &TableLayout::Table4).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "System\tMacro-F1\tAccuracy");
        assert_eq!(lines[1], "\u{2212}Augmentation\t0.6667\t0.6667");
        assert!(lines[2].starts_with("+Augmentation\t"));
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn table3_rows() {
        let t = emit_report_table(&[report(), report(), report()], &TableLayout::Table3).unwrap();
        let rows: Vec<&str> = t.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
        assert_eq!(rows, ["\u{2212}OLID", "\u{2212}Weak", "Dual"]);
    }

    #[test]
    fn arity_checked() {
        assert!(matches!(
            emit_report_table(&[report()], &TableLayout::Table3),
            Err(CliError::ArityMismatch { expected: 3, found: 1, .. })
        ));
        let t2 = TableLayout::Table2 { system: "Majority baseline".into() };
        assert!(emit_report_table(&vec![report(); 4], &t2).is_err());
        let t = emit_report_table(&vec![report(); 5], &t2).unwrap();
        assert_eq!(t.lines().next().unwrap(), "System\tTurkish\tArabic\tGreek\tDanish\tEnglish");
    }
}
