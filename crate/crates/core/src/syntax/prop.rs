use std::fmt;

/// Propositions over ⊤, ⊥, ⇒, ∧, ∨. There are no atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prop {
    Top,
    Bot,
    Imp(Box<Prop>, Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
}

impl Prop {
    pub fn imp(a: Prop, b: Prop) -> Prop {
        Prop::Imp(Box::new(a), Box::new(b))
    }

    pub fn and(a: Prop, b: Prop) -> Prop {
        Prop::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Prop, b: Prop) -> Prop {
        Prop::Or(Box::new(a), Box::new(b))
    }

    /// Syntactic size: leaves plus connectives.
    pub fn size(&self) -> usize {
        match self {
            Prop::Top | Prop::Bot => 1,
            Prop::Imp(a, b) | Prop::And(a, b) | Prop::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn connectives(&self) -> usize {
        (self.size() - 1) / 2
    }

    /// Every proposition with at most `max` connectives, ordered by connective
    /// count, then by connective (⇒, ∧, ∨), then by the split point.
    pub fn all_up_to(max: usize) -> Vec<Prop> {
        let mut by_count: Vec<Vec<Prop>> = vec![vec![Prop::Top, Prop::Bot]];
        for n in 1..=max {
            let mut level = Vec::new();
            for kind in 0..3 {
                for k in 0..n {
                    for a in &by_count[k] {
                        for b in &by_count[n - 1 - k] {
                            let (a, b) = (a.clone(), b.clone());
                            level.push(match kind {
                                0 => Prop::imp(a, b),
                                1 => Prop::and(a, b),
                                _ => Prop::or(a, b),
                            });
                        }
                    }
                }
            }
            by_count.push(level);
        }
        by_count.into_iter().flatten().collect()
    }
}

// Levels: 0 = implication (loosest), 1 = disjunction, 2 = conjunction, 3 = atom.
fn fmt_prop(p: &Prop, level: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let own = match p {
        Prop::Top | Prop::Bot => 3,
        Prop::Imp(..) => 0,
        Prop::Or(..) => 1,
        Prop::And(..) => 2,
    };
    let paren = own < level;
    if paren {
        f.write_str("(")?;
    }
    match p {
        Prop::Top => f.write_str("Top")?,
        Prop::Bot => f.write_str("Bot")?,
        Prop::Imp(a, b) => {
            fmt_prop(a, 1, f)?;
            f.write_str(" -> ")?;
            fmt_prop(b, 0, f)?;
        }
        Prop::Or(a, b) => {
            fmt_prop(a, 1, f)?;
            f.write_str(" \\/ ")?;
            fmt_prop(b, 2, f)?;
        }
        Prop::And(a, b) => {
            fmt_prop(a, 2, f)?;
            f.write_str(" /\\ ")?;
            fmt_prop(b, 3, f)?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prop(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universe_counts() {
        let all = Prop::all_up_to(3);
        assert_eq!(all.len(), 2 + 12 + 144 + 2160);
        assert!(all.iter().all(|p| p.connectives() <= 3));
    }

    #[test]
    fn display_minimal_parens() {
        let p = Prop::imp(Prop::Top, Prop::or(Prop::Top, Prop::Bot));
        assert_eq!(p.to_string(), "Top -> Top \\/ Bot");
        let q = Prop::imp(Prop::imp(Prop::Top, Prop::Top), Prop::Bot);
        assert_eq!(q.to_string(), "(Top -> Top) -> Bot");
        let r = Prop::and(Prop::Top, Prop::and(Prop::Top, Prop::Top));
        assert_eq!(r.to_string(), "Top /\\ (Top /\\ Top)");
    }
}
