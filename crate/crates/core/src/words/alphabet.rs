use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::word::{Symbol, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    DuplicateName(String),
    EmptyName,
    SpacerCollision,
}

impl fmt::Display for AlphabetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphabetError::DuplicateName(n) => write!(f, "symbol name `{n}` declared twice"),
            AlphabetError::EmptyName => write!(f, "symbol names must be nonempty"),
            AlphabetError::SpacerCollision => {
                write!(f, "spacer symbols must be two distinct ids")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AlphabetError {}

/// Named symbols. `Symbol(i)` is the `i`-th declared name. Optionally two of
/// the symbols are designated as the spacers `b` and `e` of circular words.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
    spacers: Option<(Symbol, Symbol)>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut a = Alphabet::default();
        for n in names {
            let n = n.as_ref();
            if a.symbol(n).is_some() {
                return Err(AlphabetError::DuplicateName(n.to_string()));
            }
            a.push_name(n)?;
        }
        Ok(a)
    }

    /// Lowercase letters `a`, `b`, ... (then `s26`, `s27`, ...).
    pub fn letters(count: usize) -> Self {
        let names = (0..count).map(|i| {
            if i < 26 {
                char::from(b'a' + i as u8).to_string()
            } else {
                alloc::format!("s{i}")
            }
        });
        Alphabet::new(names).expect("generated names are distinct")
    }

    fn push_name(&mut self, name: &str) -> Result<Symbol, AlphabetError> {
        if name.is_empty() {
            return Err(AlphabetError::EmptyName);
        }
        self.names.push(name.to_string());
        Ok(Symbol(self.names.len() as u32 - 1))
    }

    /// Declares the spacer pair, adding the names if they are new.
    pub fn with_spacers(mut self, b: &str, e: &str) -> Result<Self, AlphabetError> {
        if b == e {
            return Err(AlphabetError::SpacerCollision);
        }
        let b = self.intern(b)?;
        let e = self.intern(e)?;
        self.spacers = Some((b, e));
        Ok(self)
    }

    /// Id of `name`, declaring it if needed.
    pub fn intern(&mut self, name: &str) -> Result<Symbol, AlphabetError> {
        match self.symbol(name) {
            Some(s) => Ok(s),
            None => self.push_name(name),
        }
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| Symbol(i as u32))
    }

    pub fn name(&self, s: Symbol) -> Option<&str> {
        self.names.get(s.0 as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len() as u32).map(Symbol)
    }

    /// Non-spacer symbols.
    pub fn letters_only(&self) -> Vec<Symbol> {
        self.symbols().filter(|&s| !self.is_spacer(s)).collect()
    }

    pub fn spacers(&self) -> Option<(Symbol, Symbol)> {
        self.spacers
    }

    pub fn is_spacer(&self, s: Symbol) -> bool {
        matches!(self.spacers, Some((b, e)) if s == b || s == e)
    }
}

/// Removes every spacer run from `word`. Without declared spacers the word is
/// returned unchanged.
pub fn strip_spacers(word: &Word, alphabet: &Alphabet) -> Word {
    match alphabet.spacers() {
        None => word.clone(),
        Some(_) => word.retain(|s| !alphabet.is_spacer(s)),
    }
}
