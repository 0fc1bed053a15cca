//! Letters, finite words and eventually periodic left-infinite words.
//!
//! Words are stored in written order: index 0 is the leftmost letter.
//! Positions on left-infinite words are counted from the right, so
//! position 1 is the rightmost letter.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Letter = u8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub const MAX_SIZE: usize = 256;

    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > Self::MAX_SIZE {
            return Err(Error::AlphabetSize(size));
        }
        Ok(Alphabet { size })
    }

    pub fn size(self) -> usize {
        self.size
    }

    pub fn letters(self) -> impl Iterator<Item = Letter> + Clone {
        (0..self.size).map(|x| x as Letter)
    }

    pub fn contains(self, x: Letter) -> bool {
        (x as usize) < self.size
    }

    pub fn check(self, letters: &[Letter]) -> Result<()> {
        match letters.iter().find(|&&x| !self.contains(x)) {
            Some(&x) => Err(Error::LetterOutOfRange {
                letter: x as usize,
                size: self.size,
            }),
            None => Ok(()),
        }
    }

    /// All words of the given length in lexicographic order.
    pub fn words(self, len: usize) -> Vec<FiniteWord> {
        let mut out = vec![Vec::with_capacity(len)];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    self.letters().map(move |x| {
                        let mut w = w.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out.into_iter().map(FiniteWord).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteWord(Vec<Letter>);

impl FiniteWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        FiniteWord(letters)
    }

    pub fn empty() -> Self {
        FiniteWord(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<Letter>> for FiniteWord {
    fn from(v: Vec<Letter>) -> Self {
        FiniteWord(v)
    }
}

impl From<&[Letter]> for FiniteWord {
    fn from(v: &[Letter]) -> Self {
        FiniteWord(v.to_vec())
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.0)
    }
}

impl FromStr for FiniteWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_letters(s.trim(), s).map(FiniteWord)
    }
}

/// The left-infinite word `...zzz u`, kept in canonical form: the tail is
/// primitive and the head is as short as possible.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "WordRepr", into = "WordRepr")]
pub struct EventuallyPeriodicWord {
    tail: Vec<Letter>,
    head: Vec<Letter>,
}

#[derive(Serialize, Deserialize)]
struct WordRepr {
    tail: Vec<Letter>,
    #[serde(default)]
    head: Vec<Letter>,
}

impl TryFrom<WordRepr> for EventuallyPeriodicWord {
    type Error = Error;

    fn try_from(r: WordRepr) -> Result<Self> {
        normalize(r.tail, r.head)
    }
}

impl From<EventuallyPeriodicWord> for WordRepr {
    fn from(w: EventuallyPeriodicWord) -> Self {
        WordRepr {
            tail: w.tail,
            head: w.head,
        }
    }
}

/// Canonical representative of `...zzz u`.
pub fn normalize(
    tail: impl Into<Vec<Letter>>,
    head: impl Into<Vec<Letter>>,
) -> Result<EventuallyPeriodicWord> {
    let mut tail = tail.into();
    let mut head = head.into();
    if tail.is_empty() {
        return Err(Error::EmptyTail);
    }
    let p = primitive_period(&tail);
    tail.truncate(p);
    // The letter k places left of head[0] is tail[0]; absorb while they agree.
    let absorbed = head.iter().zip(tail.iter().cycle()).take_while(|(h, t)| h == t).count();
    if absorbed > 0 {
        let k = tail.len();
        let r = absorbed % k;
        tail.rotate_left(r);
        head.drain(..absorbed);
    }
    Ok(EventuallyPeriodicWord { tail, head })
}

fn primitive_period(w: &[Letter]) -> usize {
    let k = w.len();
    (1..=k)
        .find(|&p| k.is_multiple_of(p) && (p..k).all(|i| w[i] == w[i - p]))
        .unwrap_or(k)
}

impl EventuallyPeriodicWord {
    pub fn new(tail: impl Into<Vec<Letter>>, head: impl Into<Vec<Letter>>) -> Result<Self> {
        normalize(tail, head)
    }

    /// The purely periodic word `...zzz`.
    pub fn periodic(tail: impl Into<Vec<Letter>>) -> Result<Self> {
        normalize(tail, Vec::new())
    }

    pub fn tail(&self) -> &[Letter] {
        &self.tail
    }

    pub fn head(&self) -> &[Letter] {
        &self.head
    }

    /// Letter at position `i >= 1`, counted from the right.
    pub fn letter_at(&self, i: usize) -> Letter {
        assert!(i >= 1, "positions start at 1");
        let h = self.head.len();
        if i <= h {
            self.head[h - i]
        } else {
            let k = self.tail.len();
            self.tail[k - 1 - (i - h - 1) % k]
        }
    }

    pub fn last_letter(&self) -> Letter {
        self.letter_at(1)
    }

    /// The rightmost `n` letters in written order.
    pub fn suffix(&self, n: usize) -> Vec<Letter> {
        (1..=n).rev().map(|i| self.letter_at(i)).collect()
    }

    /// Drops the rightmost letter.
    pub fn shift(&self) -> Self {
        let mut w = self.clone();
        if w.head.pop().is_none() {
            w.tail.rotate_right(1);
        }
        w
    }

    /// Appends `s` on the right.
    pub fn append(&self, s: &[Letter]) -> Self {
        if s.is_empty() {
            return self.clone();
        }
        let mut head = self.head.clone();
        head.extend_from_slice(s);
        normalize(self.tail.clone(), head).expect("tail is nonempty")
    }

    pub fn check(&self, alphabet: Alphabet) -> Result<()> {
        alphabet.check(&self.tail)?;
        alphabet.check(&self.head)
    }
}

impl fmt::Display for EventuallyPeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tail.iter().chain(&self.head).all(|&x| x < 10) {
            write_letters(f, &self.tail)?;
            f.write_str("*")?;
            write_letters(f, &self.head)
        } else {
            write!(f, "{:?}*{:?}", self.tail, self.head)
        }
    }
}

impl FromStr for EventuallyPeriodicWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let input = s.trim();
        let (tail, head) = input.split_once('*').ok_or_else(|| Error::WordSyntax {
            input: s.to_string(),
            reason: "expected the form tail*head".into(),
        })?;
        let tail = parse_letters(tail.trim(), s)?;
        let head = parse_letters(head.trim(), s)?;
        normalize(tail, head).map_err(|e| Error::WordSyntax {
            input: s.to_string(),
            reason: e.to_string(),
        })
    }
}

fn write_letters(f: &mut fmt::Formatter<'_>, w: &[Letter]) -> fmt::Result {
    if w.iter().all(|&x| x < 10) {
        for &x in w {
            write!(f, "{x}")?;
        }
        Ok(())
    } else {
        write!(f, "{w:?}")
    }
}

fn parse_letters(part: &str, input: &str) -> Result<Vec<Letter>> {
    let bad = |reason: String| Error::WordSyntax {
        input: input.to_string(),
        reason,
    };
    if let Some(inner) = part.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| bad("unterminated bracket".into()))?;
        if inner.trim().is_empty() {
            return Ok(Vec::new());
        }
        inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<Letter>()
                    .map_err(|_| bad(format!("bad letter {:?}", t.trim())))
            })
            .collect()
    } else {
        part.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as Letter)
                    .ok_or_else(|| bad(format!("bad letter {c:?}")))
            })
            .collect()
    }
}
