//! Plain-text run reports: every numeric result is printed next to the
//! tolerance it was judged against, and every pass/fail flag carries a
//! named criterion.

use std::fmt::Write as _;

pub struct Report {
    title: String,
    lines: Vec<String>,
    failures: usize,
}

impl Report {
    pub fn new(title: &str) -> Self {
        Self { title: title.to_string(), lines: Vec::new(), failures: 0 }
    }

    pub fn input(&mut self, name: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("input  {name} = {value}"));
    }

    pub fn value(&mut self, name: &str, value: f64) {
        self.lines.push(format!("result {name} = {value:.16e}"));
    }

    /// A checked value: pass iff `value >= threshold`.
    pub fn check_ge(&mut self, criterion: &str, value: f64, threshold: f64) -> bool {
        let pass = value >= threshold;
        if !pass {
            self.failures += 1;
        }
        self.lines.push(format!(
            "check  {criterion}: {value:.16e} >= {threshold:.16e} (tol) ... {}",
            if pass { "PASS" } else { "FAIL" }
        ));
        pass
    }

    /// A checked value: pass iff `|value| <= tol`.
    pub fn check_abs_le(&mut self, criterion: &str, value: f64, tol: f64) -> bool {
        let pass = value.abs() <= tol;
        if !pass {
            self.failures += 1;
        }
        self.lines.push(format!(
            "check  {criterion}: |{value:.16e}| <= {tol:.16e} (tol) ... {}",
            if pass { "PASS" } else { "FAIL" }
        ));
        pass
    }

    pub fn check_flag(&mut self, criterion: &str, pass: bool) -> bool {
        if !pass {
            self.failures += 1;
        }
        self.lines
            .push(format!("check  {criterion} ... {}", if pass { "PASS" } else { "FAIL" }));
        pass
    }

    pub fn all_passed(&self) -> bool {
        self.failures == 0
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "== {} ==", self.title);
        for line in &self.lines {
            let _ = writeln!(out, "{line}");
        }
        let _ = writeln!(
            out,
            "== {}: {} ==",
            self.title,
            if self.all_passed() { "ALL CHECKS PASSED" } else { "CHECKS FAILED" }
        );
        out
    }
}
