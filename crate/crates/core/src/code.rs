//! DNA codes: parameter sets, constraint verification and the code file
//! format.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::seq::{Sequence, MAX_LEN};

/// `(n, d, w)`: word length, minimum distance and GC weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CodeParams {
    pub n: usize,
    pub d: usize,
    pub w: usize,
}

impl CodeParams {
    pub fn new(n: usize, d: usize, w: usize) -> Result<Self> {
        if n == 0 || n > MAX_LEN {
            return Err(Error::UnsupportedLength(n));
        }
        if d == 0 || d > n {
            return Err(Error::InvalidParams(format!("d={d} outside 1..={n}")));
        }
        if w > n {
            return Err(Error::InvalidParams(format!("w={w} outside 0..={n}")));
        }
        Ok(CodeParams { n, d, w })
    }

    /// Whether `s` may belong to a code with these parameters on its own:
    /// right length and weight, and far enough from its reverse complement.
    pub fn is_admissible(&self, s: &Sequence) -> bool {
        s.len() == self.n && s.gc_content() == self.w && s.self_complement_distance() >= self.d
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.n, self.d, self.w)
    }
}

/// Set of equal-length sequences sharing one parameter set, kept in canonical
/// (lexicographic) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSet {
    params: CodeParams,
    members: BTreeSet<Sequence>,
}

impl CodeSet {
    pub fn new(params: CodeParams) -> Self {
        CodeSet {
            params,
            members: BTreeSet::new(),
        }
    }

    pub fn from_members<I: IntoIterator<Item = Sequence>>(params: CodeParams, members: I) -> Result<Self> {
        let mut code = CodeSet::new(params);
        for s in members {
            code.insert(s)?;
        }
        Ok(code)
    }

    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: &Sequence) -> bool {
        self.members.contains(s)
    }

    /// Members in canonical order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = &Sequence> + '_ {
        self.members.iter()
    }

    /// Returns whether `s` was newly added.
    pub fn insert(&mut self, s: Sequence) -> Result<bool> {
        self.check_len(&s)?;
        Ok(self.members.insert(s))
    }

    pub fn remove(&mut self, s: &Sequence) -> bool {
        self.members.remove(s)
    }

    fn check_len(&self, s: &Sequence) -> Result<()> {
        if s.len() != self.params.n {
            return Err(Error::LengthMismatch {
                left: self.params.n,
                right: s.len(),
            });
        }
        Ok(())
    }

    /// Members τ with `hamming(σ, τ) < d` or `hamming(σ, RC(τ)) < d`.
    pub fn conflicts(&self, sigma: &Sequence) -> Result<Vec<Sequence>> {
        self.check_len(sigma)?;
        let d = self.params.d;
        let rc = sigma.reverse_complement();
        // hamming(σ, RC(τ)) == hamming(RC(σ), τ)
        Ok(self
            .members
            .iter()
            .filter(|t| sigma.hamming_unchecked(t) < d || rc.hamming_unchecked(t) < d)
            .copied()
            .collect())
    }

    /// Reports every violation of the distance and GC constraints.
    pub fn verify_weak(&self) -> VerifyReport {
        let mut violations = Vec::new();
        self.collect_gc(&mut violations);
        self.collect_pairs(false, &mut violations);
        VerifyReport::from_violations(violations)
    }

    /// As [`verify_weak`](Self::verify_weak), plus the reverse-complement
    /// constraint on every pair and on every member against itself.
    pub fn verify_strong(&self) -> VerifyReport {
        let mut violations = Vec::new();
        self.collect_gc(&mut violations);
        let d = self.params.d;
        for s in &self.members {
            let value = s.self_complement_distance();
            if value < d {
                violations.push(Violation {
                    kind: ViolationKind::SelfComplement,
                    first: *s,
                    second: None,
                    value,
                });
            }
        }
        self.collect_pairs(true, &mut violations);
        VerifyReport::from_violations(violations)
    }

    fn collect_gc(&self, out: &mut Vec<Violation>) {
        for s in &self.members {
            let value = s.gc_content();
            if value != self.params.w {
                out.push(Violation {
                    kind: ViolationKind::GcContent,
                    first: *s,
                    second: None,
                    value,
                });
            }
        }
    }

    fn collect_pairs(&self, complement: bool, out: &mut Vec<Violation>) {
        let d = self.params.d;
        let members: Vec<&Sequence> = self.members.iter().collect();
        for (i, a) in members.iter().enumerate() {
            let rc = a.reverse_complement();
            for b in &members[i + 1..] {
                let value = a.hamming_unchecked(b);
                if value < d {
                    out.push(Violation {
                        kind: ViolationKind::HammingPair,
                        first: **a,
                        second: Some(**b),
                        value,
                    });
                }
                if complement {
                    let value = rc.hamming_unchecked(b);
                    if value < d {
                        out.push(Violation {
                            kind: ViolationKind::ComplementPair,
                            first: **a,
                            second: Some(**b),
                            value,
                        });
                    }
                }
            }
        }
    }

    /// Reads the code file format: one sequence per line, `#` comments and
    /// blank lines ignored. Every sequence must have length `params.n`.
    pub fn read<R: BufRead>(params: CodeParams, reader: R) -> Result<Self> {
        let mut code = CodeSet::new(params);
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let s = Sequence::parse(text).map_err(|e| Error::Parse {
                line: idx + 1,
                message: e.to_string(),
            })?;
            code.insert(s).map_err(|e| Error::Parse {
                line: idx + 1,
                message: e.to_string(),
            })?;
        }
        Ok(code)
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        let p = self.params;
        writeln!(out, "# n={} d={} w={} size={}", p.n, p.d, p.w, self.len())?;
        for s in &self.members {
            writeln!(out, "{s}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("code file is ASCII")
    }
}

impl<'a> IntoIterator for &'a CodeSet {
    type Item = &'a Sequence;
    type IntoIter = std::collections::btree_set::Iter<'a, Sequence>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// Extracts `(n, d, w)` from a `# n=.. d=.. w=..` header line if the text has
/// one.
pub fn read_header(text: &str) -> Option<CodeParams> {
    let line = text.lines().find(|l| l.trim_start().starts_with('#'))?;
    let mut n = None;
    let mut d = None;
    let mut w = None;
    for tok in line.trim_start_matches(|c: char| c == '#' || c.is_whitespace()).split_whitespace() {
        let (key, value) = tok.split_once('=')?;
        let value: usize = value.parse().ok()?;
        match key {
            "n" => n = Some(value),
            "d" => d = Some(value),
            "w" => w = Some(value),
            _ => {}
        }
    }
    CodeParams::new(n?, d?, w?).ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    HammingPair,
    ComplementPair,
    SelfComplement,
    GcContent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub first: Sequence,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second: Option<Sequence>,
    /// Measured distance, or GC-content for [`ViolationKind::GcContent`].
    pub value: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.second) {
            (ViolationKind::GcContent, _) => write!(f, "GcContent {} has GC={}", self.first, self.value),
            (ViolationKind::SelfComplement, _) => {
                write!(f, "SelfComplement d({0}, RC({0}))={1}", self.first, self.value)
            }
            (ViolationKind::HammingPair, Some(b)) => {
                write!(f, "HammingPair d({}, {})={}", self.first, b, self.value)
            }
            (ViolationKind::ComplementPair, Some(b)) => {
                write!(f, "ComplementPair d({}, RC({}))={}", self.first, b, self.value)
            }
            (kind, None) => write!(f, "{kind:?} {}={}", self.first, self.value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        VerifyReport {
            valid: violations.is_empty(),
            violations,
        }
    }
}

/// Upper bound on the strong-code optimum given the weak-code optimum
/// `a_gc`: the strong optimum is at most half the weak one.
pub fn halving_upper_bound(a_gc: u64) -> Result<u64> {
    if a_gc < 1 {
        return Err(Error::InvalidParams("weak optimum must be at least 1".into()));
    }
    Ok(a_gc / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{enumerate_admissible, sample_admissible};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(text: &str) -> Sequence {
        Sequence::parse(text).unwrap()
    }

    fn code(p: (usize, usize, usize), members: &[&str]) -> CodeSet {
        let params = CodeParams::new(p.0, p.1, p.2).unwrap();
        CodeSet::from_members(params, members.iter().map(|m| s(m))).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(CodeParams::new(5, 3, 2).is_ok());
        assert!(CodeParams::new(5, 0, 2).is_err());
        assert!(CodeParams::new(5, 6, 2).is_err());
        assert!(CodeParams::new(5, 3, 6).is_err());
        assert!(CodeParams::new(0, 1, 0).is_err());
    }

    #[test]
    fn set_semantics() {
        let mut c = code((4, 1, 2), &["ACGT"]);
        assert!(!c.insert(s("ACGT")).unwrap());
        assert_eq!(c.len(), 1);
        assert!(matches!(c.insert(s("ACG")), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn weak_examples() {
        let c = code((5, 3, 2), &["AAGGA", "AGAAG"]);
        assert_eq!(s("AAGGA").hamming(&s("AGAAG")).unwrap(), 4);
        assert!(c.verify_weak().valid);
        assert!(CodeSet::new(CodeParams::new(5, 3, 2).unwrap()).verify_weak().valid);
        let bad = code((5, 3, 2), &["GGAAA", "GGAAT"]);
        let r = bad.verify_weak();
        assert!(!r.valid);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ViolationKind::HammingPair);
        assert_eq!(r.violations[0].value, 1);
    }

    #[test]
    fn reports_are_exhaustive() {
        // three mutually close words, one of wrong weight
        let c = code((5, 3, 2), &["GGAAA", "GGAAT", "GGAAC"]);
        let r = c.verify_weak();
        assert_eq!(
            r.violations.iter().filter(|v| v.kind == ViolationKind::HammingPair).count(),
            3
        );
        assert_eq!(
            r.violations.iter().filter(|v| v.kind == ViolationKind::GcContent).count(),
            1
        );
    }

    #[test]
    fn strong_examples() {
        let c = code((4, 1, 2), &["ACGT"]);
        let r = c.verify_strong();
        assert!(!r.valid);
        assert_eq!(r.violations[0].kind, ViolationKind::SelfComplement);
        assert_eq!(r.violations[0].value, 0);
        assert!(c.verify_weak().valid);
        assert!(CodeSet::new(CodeParams::new(6, 4, 3).unwrap()).verify_strong().valid);
    }

    #[test]
    fn conflict_examples() {
        let empty = CodeSet::new(CodeParams::new(5, 3, 2).unwrap());
        assert!(empty.conflicts(&s("AAGGA")).unwrap().is_empty());
        let c = code((5, 3, 2), &["AAGGA", "AGAAG"]);
        assert!(c.conflicts(&s("AAGGA")).unwrap().contains(&s("AAGGA")));
        assert!(matches!(c.conflicts(&s("AAGG")), Err(Error::LengthMismatch { .. })));
    }

    /// Greedy random strong code for (n,d,w) by shuffled first-fit.
    fn random_strong_code(rng: &mut ChaCha8Rng, p: CodeParams) -> CodeSet {
        let mut pool: Vec<Sequence> = enumerate_admissible(p.n, p.d, p.w).unwrap().collect();
        pool.shuffle(rng);
        let mut c = CodeSet::new(p);
        for x in pool.into_iter().take(rng.gen_range(0..60)) {
            if c.conflicts(&x).unwrap().is_empty() {
                c.insert(x).unwrap();
            }
        }
        c
    }

    #[test]
    fn conflicts_match_double_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(n, d, w) in &[(5, 3, 2), (6, 4, 3), (7, 3, 3), (8, 5, 4)] {
            let p = CodeParams::new(n, d, w).unwrap();
            for _ in 0..20 {
                let c = random_strong_code(&mut rng, p);
                assert!(c.verify_strong().valid);
                let sigma = sample_admissible(n, d, w, &mut rng, 1_000_000).unwrap();
                let brute: Vec<Sequence> = c
                    .iter()
                    .filter(|t| {
                        let dt = sigma.hamming(t).unwrap();
                        let dc = sigma.hamming(&t.reverse_complement()).unwrap();
                        dt < d || dc < d
                    })
                    .copied()
                    .collect();
                assert_eq!(c.conflicts(&sigma).unwrap(), brute);

                // Empty conflict set <=> adding keeps the code strong.
                let mut grown = c.clone();
                grown.insert(sigma).unwrap();
                assert_eq!(brute.is_empty(), grown.verify_strong().valid);

                for m in c.iter() {
                    let mut without = c.clone();
                    without.remove(m);
                    assert!(without.conflicts(m).unwrap().is_empty());
                }
            }
        }
    }

    #[test]
    fn strong_implies_weak_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = CodeParams::new(5, 2, 2).unwrap();
        let pool: Vec<Sequence> = crate::seq::enumerate_constant_gc(5, 2).unwrap().collect();
        let mut strict = false;
        for _ in 0..500 {
            let k = rng.gen_range(0..6);
            let c = CodeSet::from_members(p, pool.choose_multiple(&mut rng, k).copied()).unwrap();
            let (strong, weak) = (c.verify_strong().valid, c.verify_weak().valid);
            assert!(!strong || weak);
            strict |= weak && !strong;
        }
        assert!(strict, "expected some weak-but-not-strong samples");
    }

    #[test]
    fn halving_bound() {
        assert_eq!(halving_upper_bound(9).unwrap(), 4);
        assert_eq!(halving_upper_bound(30).unwrap(), 15);
        assert_eq!(halving_upper_bound(1).unwrap(), 0);
        assert!(halving_upper_bound(0).is_err());
    }

    #[test]
    fn code_file_round_trip() {
        let c = code((5, 3, 2), &["AGAAG", "AAGGA"]);
        let text = c.to_text();
        assert_eq!(text, "# n=5 d=3 w=2 size=2\nAAGGA\nAGAAG\n");
        assert_eq!(read_header(&text), Some(c.params()));
        let back = CodeSet::read(c.params(), text.as_bytes()).unwrap();
        assert_eq!(back, c);

        let messy = "# comment\n\nAGAAG\n  \n# more\nAAGGA\n";
        assert_eq!(CodeSet::read(c.params(), messy.as_bytes()).unwrap(), c);

        let bad = "AAGGA\nAAXGA\n";
        assert!(matches!(
            CodeSet::read(c.params(), bad.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        let short = "AAGG\n";
        assert!(matches!(
            CodeSet::read(c.params(), short.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
