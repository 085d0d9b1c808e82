//! Word alphabets and parsers.
//!
//! Two word languages are used throughout:
//!
//! * **Matrix words** — sequences of letters like `AG B* CT`: an upper-case
//!   matrix name, an optional flip symbol (`T` full transpose, `G` right-leg
//!   partial transpose, `L` left-leg partial transpose; none = identity), and
//!   an optional `*` for the conjugate transpose of the flipped matrix.
//! * **Entry words** — products of Haar-unitary entries like `1.1 2.2*`:
//!   `row.col` with an optional `*` for complex conjugation.

use crate::error::{Error, Result};
use crate::partition::{Eps, EpsilonMap, Sign, SignPair};
use std::fmt;

/// One of the four row/column flip operations on a matrix over a two-leg
/// tensor space: identity, full transpose, or the partial transpose acting on
/// the right or the left leg. They form a Klein four-group under composition.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Symbol {
    Identity,
    Transpose,
    /// Partial transpose on the right (second) tensor leg.
    PartialRight,
    /// Partial transpose on the left (first) tensor leg.
    PartialLeft,
}

impl Symbol {
    /// The sign pair `(theta, eta)` of the symbol: `theta` tells whether the
    /// left leg's indices are swapped, `eta` the right leg's.
    pub fn signs(self) -> SignPair {
        match self {
            Symbol::Identity => SignPair::new(Sign::Plus, Sign::Plus),
            Symbol::PartialLeft => SignPair::new(Sign::Minus, Sign::Plus),
            Symbol::PartialRight => SignPair::new(Sign::Plus, Sign::Minus),
            Symbol::Transpose => SignPair::new(Sign::Minus, Sign::Minus),
        }
    }

    /// Inverse of [`Symbol::signs`].
    pub fn from_signs(signs: SignPair) -> Symbol {
        match (signs.theta, signs.eta) {
            (Sign::Plus, Sign::Plus) => Symbol::Identity,
            (Sign::Minus, Sign::Plus) => Symbol::PartialLeft,
            (Sign::Plus, Sign::Minus) => Symbol::PartialRight,
            (Sign::Minus, Sign::Minus) => Symbol::Transpose,
        }
    }

    /// Group composition (componentwise sign product).
    pub fn compose(self, other: Symbol) -> Symbol {
        let a = self.signs();
        let b = other.signs();
        Symbol::from_signs(SignPair::new(a.theta.times(b.theta), a.eta.times(b.eta)))
    }

    /// Single-character code used in word syntax (`I`, `T`, `G`, `L`).
    pub fn code(self) -> char {
        match self {
            Symbol::Identity => 'I',
            Symbol::Transpose => 'T',
            Symbol::PartialRight => 'G',
            Symbol::PartialLeft => 'L',
        }
    }

    pub fn from_code(c: char) -> Result<Symbol> {
        match c {
            'I' => Ok(Symbol::Identity),
            'T' => Ok(Symbol::Transpose),
            'G' => Ok(Symbol::PartialRight),
            'L' => Ok(Symbol::PartialLeft),
            _ => Err(Error::parse(format!("unknown flip symbol '{c}'"))),
        }
    }
}

/// A plain (unflipped) letter: a matrix id with an optional conjugate
/// transpose star. Ids are 1-based; ids 1..=26 print as `A`..`Z`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Letter {
    pub id: usize,
    pub star: bool,
}

impl Letter {
    pub fn new(id: usize) -> Self {
        Letter { id, star: false }
    }

    pub fn starred(id: usize) -> Self {
        Letter { id, star: true }
    }

    /// The adjoint letter (star flipped).
    pub fn conj(self) -> Self {
        Letter {
            id: self.id,
            star: !self.star,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_id(f, self.id)?;
        if self.star {
            write!(f, "*")?;
        }
        Ok(())
    }
}

fn write_id(f: &mut fmt::Formatter<'_>, id: usize) -> fmt::Result {
    if (1..=26).contains(&id) {
        write!(f, "{}", (b'A' + (id - 1) as u8) as char)
    } else {
        write!(f, "#{id}")
    }
}

/// A word letter: a matrix id, the flip symbol applied to it, and an optional
/// conjugate-transpose star (applied after the flip).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct WordLetter {
    pub id: usize,
    pub symbol: Symbol,
    pub star: bool,
}

impl WordLetter {
    pub fn new(id: usize, symbol: Symbol, star: bool) -> Self {
        WordLetter { id, symbol, star }
    }

    /// Forgets the flip symbol, keeping the underlying letter and star.
    pub fn plain(self) -> Letter {
        Letter {
            id: self.id,
            star: self.star,
        }
    }
}

impl fmt::Display for WordLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_id(f, self.id)?;
        if self.symbol != Symbol::Identity {
            write!(f, "{}", self.symbol.code())?;
        }
        if self.star {
            write!(f, "*")?;
        }
        Ok(())
    }
}

/// A matrix word.
pub type Word = Vec<WordLetter>;

/// Parses a matrix word: whitespace-separated letters, each an upper-case
/// name `A`–`Z`, an optional flip code from `{T, G, L}`, and an optional
/// trailing `*`. Example: `"AG B* CT"`.
pub fn parse_word(input: &str) -> Result<Word> {
    let mut out = Vec::new();
    for token in input.split_whitespace() {
        let mut chars = token.chars();
        let name = chars
            .next()
            .ok_or_else(|| Error::parse("empty word letter"))?;
        if !name.is_ascii_uppercase() {
            return Err(Error::parse(format!(
                "letter must start with A-Z, got '{name}' in token '{token}'"
            )));
        }
        let id = (name as u8 - b'A') as usize + 1;
        let mut symbol = Symbol::Identity;
        let mut star = false;
        let rest: Vec<char> = chars.collect();
        match rest.as_slice() {
            [] => {}
            ['*'] => star = true,
            [s] => symbol = flip_code(*s, token)?,
            [s, '*'] => {
                symbol = flip_code(*s, token)?;
                star = true;
            }
            _ => {
                return Err(Error::parse(format!(
                    "malformed letter token '{token}' (expect NAME[T|G|L][*])"
                )))
            }
        }
        out.push(WordLetter { id, symbol, star });
    }
    if out.is_empty() {
        return Err(Error::parse("empty word"));
    }
    Ok(out)
}

fn flip_code(c: char, token: &str) -> Result<Symbol> {
    match c {
        'T' => Ok(Symbol::Transpose),
        'G' => Ok(Symbol::PartialRight),
        'L' => Ok(Symbol::PartialLeft),
        _ => Err(Error::parse(format!(
            "unknown flip '{c}' in token '{token}' (expect T, G or L)"
        ))),
    }
}

/// Renders a word in canonical form (single spaces, `Display` letters).
pub fn word_to_string(word: &[WordLetter]) -> String {
    word.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses a pure symbol string like `"GIG"` (one flip code per position,
/// including `I`).
pub fn parse_symbol_word(input: &str) -> Result<Vec<Symbol>> {
    if input.is_empty() {
        return Err(Error::parse("empty symbol word"));
    }
    input.chars().map(Symbol::from_code).collect()
}

/// One factor of an entry word: the `(row, col)` entry of a Haar unitary,
/// conjugated when starred.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct EntryFactor {
    pub row: usize,
    pub col: usize,
    pub star: bool,
}

impl fmt::Display for EntryFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.row, self.col)?;
        if self.star {
            write!(f, "*")?;
        }
        Ok(())
    }
}

/// Parses an entry word: whitespace-separated `row.col` factors with an
/// optional trailing `*`, e.g. `"1.1 1.2*"`. Indices are 1-based.
pub fn parse_entry_word(input: &str) -> Result<Vec<EntryFactor>> {
    let mut out = Vec::new();
    for token in input.split_whitespace() {
        let (body, star) = match token.strip_suffix('*') {
            Some(b) => (b, true),
            None => (token, false),
        };
        let (r, c) = body
            .split_once('.')
            .ok_or_else(|| Error::parse(format!("entry factor '{token}' lacks a '.'")))?;
        let row: usize = r
            .parse()
            .map_err(|_| Error::parse(format!("bad row index in '{token}'")))?;
        let col: usize = c
            .parse()
            .map_err(|_| Error::parse(format!("bad column index in '{token}'")))?;
        if row == 0 || col == 0 {
            return Err(Error::parse(format!("indices are 1-based in '{token}'")));
        }
        out.push(EntryFactor { row, col, star });
    }
    if out.is_empty() {
        return Err(Error::parse("empty entry word"));
    }
    Ok(out)
}

/// Splits an entry word into the row list, column list, and ε-word consumed
/// by the exact moment evaluators.
pub fn entry_word_parts(factors: &[EntryFactor]) -> (Vec<usize>, Vec<usize>, EpsilonMap) {
    let rows = factors.iter().map(|f| f.row).collect();
    let cols = factors.iter().map(|f| f.col).collect();
    let eps: Vec<Eps> = factors
        .iter()
        .map(|f| if f.star { Eps::Star } else { Eps::Plain })
        .collect();
    (rows, cols, EpsilonMap::from_slice(&eps))
}

/// Renders an entry word canonically.
pub fn entry_word_to_string(factors: &[EntryFactor]) -> String {
    factors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_signs_round_trip() {
        for s in [
            Symbol::Identity,
            Symbol::Transpose,
            Symbol::PartialRight,
            Symbol::PartialLeft,
        ] {
            assert_eq!(Symbol::from_signs(s.signs()), s);
            assert_eq!(Symbol::from_code(s.code()).unwrap(), s);
            // Every element is an involution in the Klein group.
            assert_eq!(s.compose(s), Symbol::Identity);
        }
        // The two partial transposes compose to the full transpose.
        assert_eq!(
            Symbol::PartialRight.compose(Symbol::PartialLeft),
            Symbol::Transpose
        );
        assert_eq!(
            Symbol::Transpose.compose(Symbol::PartialRight),
            Symbol::PartialLeft
        );
    }

    #[test]
    fn parse_and_display_words() {
        let w = parse_word("AG B* CT DL*").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w[0], WordLetter::new(1, Symbol::PartialRight, false));
        assert_eq!(w[1], WordLetter::new(2, Symbol::Identity, true));
        assert_eq!(w[2], WordLetter::new(3, Symbol::Transpose, false));
        assert_eq!(w[3], WordLetter::new(4, Symbol::PartialLeft, true));
        assert_eq!(word_to_string(&w), "AG B* CT DL*");
        // A letter named T with a transpose flip is unambiguous.
        let t = parse_word("TT").unwrap();
        assert_eq!(t[0], WordLetter::new(20, Symbol::Transpose, false));
    }

    #[test]
    fn parse_word_rejects_malformed_tokens() {
        assert!(parse_word("").is_err());
        assert!(parse_word("a").is_err());
        assert!(parse_word("AX").is_err());
        assert!(parse_word("AG**").is_err());
        assert!(parse_word("A G XYZ").is_err());
    }

    #[test]
    fn parse_symbol_words() {
        use Symbol::*;
        assert_eq!(
            parse_symbol_word("GIGT").unwrap(),
            vec![PartialRight, Identity, PartialRight, Transpose]
        );
        assert!(parse_symbol_word("").is_err());
        assert!(parse_symbol_word("GX").is_err());
    }

    #[test]
    fn parse_entry_words() {
        let w = parse_entry_word("1.1 1.2*").unwrap();
        assert_eq!(
            w,
            vec![
                EntryFactor {
                    row: 1,
                    col: 1,
                    star: false
                },
                EntryFactor {
                    row: 1,
                    col: 2,
                    star: true
                },
            ]
        );
        assert_eq!(entry_word_to_string(&w), "1.1 1.2*");
        let (rows, cols, eps) = entry_word_parts(&w);
        assert_eq!(rows, vec![1, 1]);
        assert_eq!(cols, vec![1, 2]);
        assert_eq!(eps.at(1), Eps::Plain);
        assert_eq!(eps.at(2), Eps::Star);
        assert!(parse_entry_word("1.0").is_err());
        assert!(parse_entry_word("11").is_err());
        assert!(parse_entry_word("").is_err());
    }

    #[test]
    fn letters_display_and_conjugate() {
        assert_eq!(Letter::new(1).to_string(), "A");
        assert_eq!(Letter::starred(2).to_string(), "B*");
        assert_eq!(Letter::new(27).to_string(), "#27");
        assert_eq!(Letter::new(3).conj(), Letter::starred(3));
        assert_eq!(
            WordLetter::new(1, Symbol::PartialRight, true).to_string(),
            "AG*"
        );
    }
}
