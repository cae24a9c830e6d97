//! Built-in inequalities, kept as source text in the expression grammar.

use alloc::string::ToString;
use alloc::vec;

use super::{parse_expression, Applicability, RankExpression};
use crate::{Error, Result};

pub const BUILTIN_NAMES: [&str; 4] = ["shannon-elemental", "ingleton", "t8", "non-t8"];

/// `I(A;B|C) ≥ 0`, the generator of all Shannon inequalities.
const SHANNON_ELEMENTAL: &str = "
vars A,B,C
I(A;B|C) >= 0
";

/// Ingleton: `I(A;B) ≤ I(A;B|C) + I(A;B|D) + I(C;D)`.
const INGLETON: &str = "
vars A,B,C,D
I(A;B) <= I(A;B|C) + I(A;B|D) + I(C;D)
";

/// Holds over every finite field of characteristic other than 3.
const T8: &str = "
vars A,B,C,D,W,X,Y,Z
H(A) <= 8 H(Z) + 29 H(Y) + 3 H(X) + 8 H(W) - 6 H(D) - 17 H(C) - 8 H(B) - 17 H(A)
      + 55 H(Z|A,B,C) + 35 H(Y|W,X,Z) + 50 H(X|A,C,D) + 49 H(W|B,C,D)
      + 18 H(A|B,D,Y) + 7 H(B|D,X,Z) + H(B|A,W,X) + 7 H(C|D,Y,Z)
      + 7 H(C|B,X,Y) + 3 H(C|A,W,Y) + 6 H(D|A,W,Z)
      + 49 (H(A) + H(B) + H(C) + H(D) - H(A,B,C,D))
";

/// Holds over every finite field of characteristic 3.
const NON_T8: &str = "
vars A,B,C,D,W,X,Y,Z
H(A) <= 9 H(Z) + 8 H(Y) + 5 H(X) + 6 H(W) - 4 H(D) - 12 H(C) - 11 H(B) - H(A)
      + 19 H(Z|A,B,C) + 17 H(Y|A,B,D) + 13 H(X|A,C,D) + 11 H(W|B,C,D)
      + H(A|W,X,Y,Z) + H(A|B,W,X) + 7 H(B|D,X,Z) + 4 H(B|C,X,Y)
      + 7 H(C|D,Y,Z) + 5 H(C|A,W,Y) + 4 H(D|A,W,Z)
      + 29 (H(A) + H(B) + H(C) + H(D) - H(A,B,C,D))
";

/// Look up a catalog inequality by name.
pub fn builtin(name: &str) -> Result<RankExpression> {
    let (text, applicability) = match name {
        "shannon-elemental" => (SHANNON_ELEMENTAL, Applicability::All),
        "ingleton" => (INGLETON, Applicability::All),
        "t8" => (T8, Applicability::ExceptChar(vec![3])),
        "non-t8" => (NON_T8, Applicability::OnlyChar(vec![3])),
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    let expr = parse_expression(text).expect("catalog text parses");
    Ok(expr.with_name(name).with_applicability(applicability))
}
