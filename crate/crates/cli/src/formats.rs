//! Text formats for words, exact rationals and roof descriptions. Trees use
//! the core text format (one node per line).

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use kakutani_core::flows::RoofFunction;
use kakutani_core::{Alphabet, SignedRational, Symbol, Word};

/// Parses `a^4 b^4 c`; names are interned into `alphabet`.
pub fn parse_word(text: &str, alphabet: &mut Alphabet) -> Result<Word> {
    let mut w = Word::empty();
    for token in text.split_whitespace() {
        let (name, count) = match token.split_once('^') {
            Some((name, count)) => {
                let count: u64 = count.parse().with_context(|| format!("bad run length in `{token}`"))?;
                (name, count)
            }
            None => (token, 1),
        };
        if count == 0 {
            bail!("zero run length in `{token}`");
        }
        let s = alphabet.intern(name)?;
        w.push(s, count);
    }
    Ok(w)
}

pub fn format_word(word: &Word, alphabet: &Alphabet) -> String {
    let name = |s: Symbol| alphabet.name(s).map(str::to_owned).unwrap_or_else(|| format!("s{}", s.0));
    word.runs()
        .iter()
        .map(|r| if r.count == 1 { name(r.symbol) } else { format!("{}^{}", name(r.symbol), r.count) })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Non-empty, non-comment lines of a words file.
pub fn parse_words(text: &str, alphabet: &mut Alphabet) -> Result<Vec<Word>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(i, l)| parse_word(l, alphabet).with_context(|| format!("word {}", i + 1)))
        .collect()
}

pub fn read_words(path: &Path, alphabet: &mut Alphabet) -> Result<Vec<Word>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_words(&text, alphabet)
}

/// `p/q`, an integer, or a decimal with at most 18 fractional digits.
pub fn parse_rational(text: &str) -> Result<SignedRational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().with_context(|| format!("bad numerator in `{t}`"))?;
        let q: i64 = q.trim().parse().with_context(|| format!("bad denominator in `{t}`"))?;
        if q == 0 {
            bail!("zero denominator in `{t}`");
        }
        return Ok(SignedRational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
            bail!("cannot read `{t}` as an exact decimal");
        }
        let den = 10i64.pow(frac.len() as u32);
        let negative = int.starts_with('-');
        let whole: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse()? };
        let part: i64 = if frac.is_empty() { 0 } else { frac.parse()? };
        let magnitude = SignedRational::from_integer(whole.abs()) + SignedRational::new(part, den);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    Ok(SignedRational::from_integer(t.parse().with_context(|| format!("bad number `{t}`"))?))
}

pub fn format_rational(q: &SignedRational) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `constant:<v>`, `cosine:<a>,<b>` or `sawtooth:<teeth>`.
pub fn parse_roof(text: &str) -> Result<RoofFunction> {
    let (kind, args) = text.split_once(':').unwrap_or((text, ""));
    let nums = || -> Result<Vec<f64>> {
        args.split(',').map(|a| a.trim().parse::<f64>().with_context(|| format!("bad roof argument in `{text}`"))).collect()
    };
    let roof = match kind {
        "constant" => RoofFunction::Constant { value: if args.is_empty() { 1.0 } else { nums()?[0] } },
        "cosine" => match nums()?.as_slice() {
            [a, b] => RoofFunction::Cosine { a: *a, b: *b },
            _ => bail!("cosine roof needs two coefficients: cosine:<a>,<b>"),
        },
        "sawtooth" => RoofFunction::Sawtooth { teeth: args.trim().parse().with_context(|| format!("bad teeth in `{text}`"))? },
        _ => bail!("unknown roof `{text}` (expected constant:, cosine: or sawtooth:)"),
    };
    if let RoofFunction::Constant { value } = roof {
        if value <= 0.0 {
            bail!("the roof must be positive");
        }
    }
    Ok(roof)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_round_trip() {
        let mut a = Alphabet::default();
        let w = parse_word("a^4 b^4 a c", &mut a).unwrap();
        assert_eq!(w.len(), 10);
        assert_eq!(format_word(&w, &a), "a^4 b^4 a c");
        let merged = parse_word("a^2 a^3", &mut a).unwrap();
        assert_eq!(format_word(&merged, &a), "a^5");
        assert!(parse_word("a^0", &mut a).is_err());
        assert!(parse_word("a^x", &mut a).is_err());
    }

    #[test]
    fn roofs() {
        assert_eq!(parse_roof("constant:1").unwrap(), RoofFunction::Constant { value: 1.0 });
        assert_eq!(parse_roof("cosine:0.25,0.2").unwrap(), RoofFunction::Cosine { a: 0.25, b: 0.2 });
        assert_eq!(parse_roof("sawtooth:16").unwrap(), RoofFunction::Sawtooth { teeth: 16 });
        assert!(parse_roof("wave:3").is_err());
        assert!(parse_roof("constant:-1").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/6").unwrap(), SignedRational::new(1, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), SignedRational::new(-1, 4));
        assert_eq!(parse_rational("7").unwrap(), SignedRational::from_integer(7));
        assert_eq!(format_rational(&SignedRational::new(2, 4)), "1/2");
        assert!(parse_rational("1/0").is_err());
    }
}
