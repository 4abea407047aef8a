//! Letters, words of `T₊(A)` and bar-words of `H = T(T₊(A))`, together with
//! the position combinatorics the coproduct is built from.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result, MAX_TRUNCATION};

#[derive(Default)]
struct Interner {
    names: Vec<Arc<str>>,
    ids: HashMap<Arc<str>, u32>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(Default::default)
}

/// An interned letter name. Comparison and hashing use the interned id.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u32);

impl Letter {
    /// Interns `name`. Names must be nonempty and may not contain `.`, `|`
    /// or whitespace, since those delimit words in the text formats.
    pub fn new(name: &str) -> Result<Self> {
        if name.is_empty() || name.contains(['.', '|']) || name.contains(char::is_whitespace) {
            return Err(Error::InvalidLetter(name.to_string()));
        }
        if let Some(&id) = interner().read().unwrap().ids.get(name) {
            return Ok(Letter(id));
        }
        let mut table = interner().write().unwrap();
        if let Some(&id) = table.ids.get(name) {
            return Ok(Letter(id));
        }
        let id = table.names.len() as u32;
        let name: Arc<str> = Arc::from(name);
        table.names.push(name.clone());
        table.ids.insert(name, id);
        Ok(Letter(id))
    }

    pub fn name(&self) -> Arc<str> {
        interner().read().unwrap().names[self.0 as usize].clone()
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        Letter::new(&name).map_err(D::Error::custom)
    }
}

/// A nonempty word `a₁⋯aₙ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Word(letters))
    }

    pub(crate) fn from_letters(letters: Vec<Letter>) -> Self {
        debug_assert!(!letters.is_empty());
        Word(letters)
    }

    /// Parses the dot-joined form used as table keys, e.g. `"a.a.b"`.
    pub fn parse(dotted: &str) -> Result<Self> {
        let letters = dotted.split('.').map(Letter::new).collect::<Result<Vec<_>>>()?;
        Word::new(letters)
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let letters = names.iter().map(|n| Letter::new(n.as_ref())).collect::<Result<Vec<_>>>()?;
        Word::new(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Dot-joined key form.
    pub fn dotted(&self) -> String {
        self.0.iter().map(|l| l.name().to_string()).collect::<Vec<_>>().join(".")
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dotted())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dotted())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let letters = Vec::<Letter>::deserialize(deserializer)?;
        Word::new(letters).map_err(D::Error::custom)
    }
}

/// A bar-word `w₁|⋯|wₘ`; the empty sequence is the unit `𝟏`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BarWord(Vec<Word>);

impl BarWord {
    pub fn unit() -> Self {
        BarWord(Vec::new())
    }

    pub fn new(factors: Vec<Word>) -> Self {
        BarWord(factors)
    }

    /// Parses `"a.b|c"`; `"1"` and `""` denote the unit.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "1" {
            return Ok(BarWord::unit());
        }
        text.split('|').map(Word::parse).collect::<Result<Vec<_>>>().map(BarWord)
    }

    pub fn factors(&self) -> &[Word] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(Word::len).sum()
    }

    /// The single factor, if this bar-word is a word.
    pub fn as_word(&self) -> Option<&Word> {
        match self.0.as_slice() {
            [w] => Some(w),
            _ => None,
        }
    }

    /// Bar-concatenation `self | other`.
    pub fn concat(&self, other: &BarWord) -> BarWord {
        let mut factors = Vec::with_capacity(self.0.len() + other.0.len());
        factors.extend_from_slice(&self.0);
        factors.extend_from_slice(&other.0);
        BarWord(factors)
    }

    pub(crate) fn push(&mut self, word: Word) {
        self.0.push(word);
    }
}

impl From<Word> for BarWord {
    fn from(w: Word) -> Self {
        BarWord(vec![w])
    }
}

impl fmt::Debug for BarWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BarWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(Word::dotted).collect();
        f.write_str(&parts.join("|"))
    }
}

impl Serialize for BarWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BarWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Vec::<Word>::deserialize(deserializer).map(BarWord)
    }
}

fn check_positions(positions: &[usize], len: usize) -> Result<()> {
    for (i, &p) in positions.iter().enumerate() {
        if p == 0 || p > len {
            return Err(Error::IndexOutOfRange { index: p, len });
        }
        if i > 0 && positions[i - 1] >= p {
            return Err(Error::NotIncreasing(positions.to_vec()));
        }
    }
    Ok(())
}

/// `a_S` for an increasing set of 1-based positions; `None` stands for the
/// unit when `S` is empty.
pub fn subword(w: &Word, positions: &[usize]) -> Result<Option<Word>> {
    check_positions(positions, w.len())?;
    if positions.is_empty() {
        return Ok(None);
    }
    Ok(Some(Word(positions.iter().map(|&p| w.0[p - 1]).collect())))
}

/// `a_{J^S_U}`: the connected components of `U − S` relative to `U`,
/// in order, each rendered as a subword.
pub fn complement_components(w: &Word, inner: &[usize], outer: &[usize]) -> Result<BarWord> {
    check_positions(inner, w.len())?;
    check_positions(outer, w.len())?;
    let mut in_inner = vec![false; w.len() + 1];
    for &p in inner {
        in_inner[p] = true;
    }
    let mut in_outer = vec![false; w.len() + 1];
    for &p in outer {
        in_outer[p] = true;
    }
    if inner.iter().any(|&p| !in_outer[p]) {
        return Err(Error::NotSubset { inner: inner.to_vec(), outer: outer.to_vec() });
    }
    let mut result = BarWord::unit();
    let mut run = Vec::new();
    for &p in outer {
        if in_inner[p] {
            if !run.is_empty() {
                result.push(Word(std::mem::take(&mut run)));
            }
        } else {
            run.push(w.0[p - 1]);
        }
    }
    if !run.is_empty() {
        result.push(Word(run));
    }
    Ok(result)
}

/// An ordered, duplicate-free set of letters.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet(Arc<[Letter]>);

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let letters = names.iter().map(|n| Letter::new(n.as_ref())).collect::<Result<Vec<_>>>()?;
        Self::from_letters(letters)
    }

    pub fn from_letters(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Mismatch("alphabet must not be empty".into()));
        }
        for (i, l) in letters.iter().enumerate() {
            if letters[..i].contains(l) {
                return Err(Error::Mismatch(format!("duplicate letter {l}")));
            }
        }
        Ok(Alphabet(letters.into()))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn contains(&self, letter: Letter) -> bool {
        self.0.contains(&letter)
    }

    pub fn names(&self) -> Vec<String> {
        self.0.iter().map(|l| l.name().to_string()).collect()
    }

    fn rank(&self, letter: Letter) -> usize {
        self.0.iter().position(|&l| l == letter).unwrap_or(usize::MAX)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// An alphabet together with the truncation degree `N`: every table and
/// every series is exact on words of length at most `N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    alphabet: Alphabet,
    max_len: usize,
}

impl Domain {
    pub fn new(alphabet: Alphabet, max_len: usize) -> Result<Self> {
        if max_len == 0 || max_len > MAX_TRUNCATION {
            return Err(Error::TruncationRange(max_len));
        }
        Ok(Domain { alphabet, max_len })
    }

    pub fn univariate(letter: &str, max_len: usize) -> Result<Self> {
        Domain::new(Alphabet::new(&[letter])?, max_len)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Same alphabet, different truncation.
    pub fn with_max_len(&self, max_len: usize) -> Result<Self> {
        Domain::new(self.alphabet.clone(), max_len)
    }

    /// Validates letters and length of `w` against this domain.
    pub fn check_word(&self, w: &Word) -> Result<()> {
        if let Some(l) = w.letters().iter().find(|l| !self.alphabet.contains(**l)) {
            return Err(Error::UnknownLetter(l.name().to_string()));
        }
        if w.len() > self.max_len {
            return Err(Error::Truncation { degree: w.len(), max_len: self.max_len });
        }
        Ok(())
    }

    /// All words of exactly `len` letters, lexicographic in alphabet order.
    pub fn words_of_len(&self, len: usize) -> Vec<Word> {
        let letters = self.alphabet.letters();
        let mut out: Vec<Vec<Letter>> = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    letters.iter().map(move |&l| {
                        let mut next = prefix.clone();
                        next.push(l);
                        next
                    })
                })
                .collect();
        }
        if len == 0 {
            return Vec::new();
        }
        out.into_iter().map(Word).collect()
    }

    /// All words of length `1..=max_len`, by length then lexicographically.
    pub fn words(&self) -> Vec<Word> {
        (1..=self.max_len).flat_map(|n| self.words_of_len(n)).collect()
    }

    /// All bar-words of degree at most `max_degree`, the unit first.
    pub fn bar_words(&self, max_degree: usize) -> Vec<BarWord> {
        let mut out = vec![BarWord::unit()];
        for degree in 1..=max_degree {
            let words = self.words_of_len(degree);
            for composition in compositions(degree) {
                for w in &words {
                    let mut factors = Vec::with_capacity(composition.len());
                    let mut start = 0;
                    for &part in &composition {
                        factors.push(Word(w.0[start..start + part].to_vec()));
                        start += part;
                    }
                    out.push(BarWord(factors));
                }
            }
        }
        out
    }

    /// Sort key placing words by length, then by alphabet order.
    pub fn word_order(&self, w: &Word) -> (usize, Vec<usize>) {
        (w.len(), w.letters().iter().map(|&l| self.alphabet.rank(l)).collect())
    }
}

/// Ordered compositions of `n` into positive parts.
pub(crate) fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    (0..1u32 << (n - 1))
        .map(|cuts| {
            let mut parts = Vec::new();
            let mut current = 1;
            for i in 0..n - 1 {
                if cuts >> i & 1 == 1 {
                    parts.push(current);
                    current = 1;
                } else {
                    current += 1;
                }
            }
            parts.push(current);
            parts
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn bar(s: &str) -> BarWord {
        BarWord::parse(s).unwrap()
    }

    #[test]
    fn subword_picks_positions() {
        let w = word("a1.a2.a3");
        assert_eq!(subword(&w, &[1, 3]).unwrap(), Some(word("a1.a3")));
        assert_eq!(subword(&w, &[1, 2, 3]).unwrap(), Some(w.clone()));
        assert_eq!(subword(&w, &[]).unwrap(), None);
        let w6 = word("a1.a2.a3.a4.a5.a6");
        assert_eq!(subword(&w6, &[1, 3, 5]).unwrap(), Some(word("a1.a3.a5")));
    }

    #[test]
    fn subword_rejects_bad_positions() {
        let w = word("a.b");
        assert!(matches!(subword(&w, &[3]), Err(Error::IndexOutOfRange { index: 3, len: 2 })));
        assert!(matches!(subword(&w, &[0]), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(subword(&w, &[2, 1]), Err(Error::NotIncreasing(_))));
    }

    #[test]
    fn complement_components_examples() {
        let w6 = word("a1.a2.a3.a4.a5.a6");
        let all = [1, 2, 3, 4, 5, 6];
        assert_eq!(complement_components(&w6, &[1, 3, 5], &all).unwrap(), bar("a2|a4|a6"));
        assert_eq!(complement_components(&w6, &[3, 6], &all).unwrap(), bar("a1.a2|a4.a5"));
        assert_eq!(complement_components(&w6, &all, &all).unwrap(), BarWord::unit());
        assert_eq!(complement_components(&w6, &[], &all).unwrap(), BarWord::from(w6.clone()));
    }

    #[test]
    fn components_are_relative_to_outer_set() {
        let w = word("a.b.c.d.e");
        // 3 sits between 1 and 5 inside U, so it separates them
        assert_eq!(complement_components(&w, &[3], &[1, 3, 5]).unwrap(), bar("a|e"));
        // gaps outside U do not separate
        assert_eq!(complement_components(&w, &[], &[1, 3, 5]).unwrap(), bar("a.c.e"));
        assert!(matches!(complement_components(&w, &[2], &[1, 3]), Err(Error::NotSubset { .. })));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(bar("1"), BarWord::unit());
        assert_eq!(bar("a.b|c").to_string(), "a.b|c");
        assert_eq!(bar("a.b|c").degree(), 3);
        assert!(Word::parse("").is_err());
        assert!(Letter::new("a.b").is_err());
    }

    #[test]
    fn json_shapes() {
        let b = bar("a.a.b|c");
        let text = serde_json::to_string(&b).unwrap();
        assert_eq!(text, r#"[["a","a","b"],["c"]]"#);
        let back: BarWord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, b);
        assert!(serde_json::from_str::<Word>("[]").is_err());
    }

    #[test]
    fn enumeration_counts() {
        let d = Domain::new(Alphabet::new(&["a", "b"]).unwrap(), 3).unwrap();
        assert_eq!(d.words().len(), 2 + 4 + 8);
        // Σ_d 2^d · 2^{d-1} plus the unit
        assert_eq!(d.bar_words(3).len(), 1 + 2 + 8 + 32);
        assert_eq!(compositions(4).len(), 8);
    }

    #[test]
    fn domain_guards() {
        let a = Alphabet::new(&["a"]).unwrap();
        assert!(Domain::new(a.clone(), 0).is_err());
        assert!(Domain::new(a.clone(), 13).is_err());
        let d = Domain::new(a, 2).unwrap();
        assert!(matches!(d.check_word(&word("a.a.a")), Err(Error::Truncation { .. })));
        assert!(matches!(d.check_word(&word("z")), Err(Error::UnknownLetter(_))));
        assert!(Alphabet::new(&["a", "a"]).is_err());
    }
}
