use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// Position of an independent variable name in the global symbol order.
///
/// `x` and `t` come first (in that order) so jet suffixes print as `u_xt`.
pub fn var_rank(name: &str) -> (u8, &str) {
    match name {
        "x" => (0, ""),
        "t" => (1, ""),
        "y" => (2, ""),
        other => (3, other),
    }
}

/// Sorted multiset of independent-variable names labelling a partial derivative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<Arc<str>>);

impl MultiIndex {
    pub fn new<I, S>(vars: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut v: Vec<Arc<str>> = vars.into_iter().map(|s| Arc::from(s.as_ref())).collect();
        v.sort_by(|a, b| var_rank(a).cmp(&var_rank(b)));
        MultiIndex(v)
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|s| s.as_ref())
    }

    pub fn with(&self, var: &str) -> Self {
        let mut v = self.0.clone();
        v.push(Arc::from(var));
        v.sort_by(|a, b| var_rank(a).cmp(&var_rank(b)));
        MultiIndex(v)
    }

    /// Removes one occurrence of `var`, if present.
    pub fn without(&self, var: &str) -> Option<Self> {
        let pos = self.0.iter().position(|s| s.as_ref() == var)?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some(MultiIndex(v))
    }

    /// True when `other` is a sub-multiset of `self`.
    pub fn contains(&self, other: &MultiIndex) -> bool {
        let mut rest = self.clone();
        for v in other.vars() {
            match rest.without(v) {
                Some(r) => rest = r,
                None => return false,
            }
        }
        true
    }

    /// Multiset difference `self - other`; `None` unless `other` is contained in `self`.
    pub fn minus(&self, other: &MultiIndex) -> Option<Self> {
        let mut rest = self.clone();
        for v in other.vars() {
            rest = rest.without(v)?;
        }
        Some(rest)
    }

    pub fn suffix(&self) -> String {
        self.0.iter().map(|s| s.as_ref()).collect()
    }

    fn cmp_key(&self) -> Vec<(u8, &str)> {
        self.0.iter().map(|s| var_rank(s)).collect()
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.cmp_key().cmp(&other.cmp_key()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Independent,
    Dependent,
    /// Derivative coordinate of `dependent` in jet space.
    Jet {
        dependent: Arc<str>,
        index: MultiIndex,
    },
    Parameter,
    /// Unknown function of `args`, differentiated `derivs` times.
    UnknownFunction {
        base: Arc<str>,
        args: Vec<Arc<str>>,
        derivs: MultiIndex,
    },
}

impl SymbolKind {
    fn rank(&self) -> u8 {
        match self {
            SymbolKind::Independent => 0,
            SymbolKind::Dependent => 1,
            SymbolKind::Jet { .. } => 2,
            SymbolKind::Parameter => 3,
            SymbolKind::UnknownFunction { .. } => 4,
        }
    }
}

/// A named symbol together with its role in jet space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    name: Arc<str>,
    kind: SymbolKind,
}

impl Symbol {
    pub fn independent(name: &str) -> Self {
        Symbol {
            name: Arc::from(name),
            kind: SymbolKind::Independent,
        }
    }

    pub fn dependent(name: &str) -> Self {
        Symbol {
            name: Arc::from(name),
            kind: SymbolKind::Dependent,
        }
    }

    pub fn parameter(name: &str) -> Self {
        Symbol {
            name: Arc::from(name),
            kind: SymbolKind::Parameter,
        }
    }

    /// Jet coordinate of `dependent` for the derivative multiset `vars`.
    /// An empty multiset yields the dependent variable itself.
    pub fn jet<I, S>(dependent: &str, vars: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::jet_from_index(dependent, MultiIndex::new(vars))
    }

    pub fn jet_from_index(dependent: &str, index: MultiIndex) -> Self {
        if index.order() == 0 {
            return Symbol::dependent(dependent);
        }
        Symbol {
            name: Arc::from(format!("{}_{}", dependent, index.suffix())),
            kind: SymbolKind::Jet {
                dependent: Arc::from(dependent),
                index,
            },
        }
    }

    pub fn unknown_function<I, S>(base: &str, args: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::unknown_derivative(
            base,
            args.into_iter().map(|a| Arc::from(a.as_ref())).collect(),
            MultiIndex::empty(),
        )
    }

    pub(crate) fn unknown_derivative(base: &str, args: Vec<Arc<str>>, derivs: MultiIndex) -> Self {
        let name = if derivs.order() == 0 {
            base.to_string()
        } else {
            format!("{}_{}", base, derivs.suffix())
        };
        Symbol {
            name: Arc::from(name),
            kind: SymbolKind::UnknownFunction {
                base: Arc::from(base),
                args,
                derivs,
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn is_jet_like(&self) -> bool {
        matches!(self.kind, SymbolKind::Dependent | SymbolKind::Jet { .. })
    }

    /// Derivative multi-index for jets (empty for the dependent variable itself).
    pub fn jet_index(&self) -> Option<MultiIndex> {
        match &self.kind {
            SymbolKind::Dependent => Some(MultiIndex::empty()),
            SymbolKind::Jet { index, .. } => Some(index.clone()),
            _ => None,
        }
    }

    /// Name of the dependent variable a jet coordinate belongs to.
    pub fn jet_dependent(&self) -> Option<&str> {
        match &self.kind {
            SymbolKind::Dependent => Some(&self.name),
            SymbolKind::Jet { dependent, .. } => Some(dependent),
            _ => None,
        }
    }

    /// Jet coordinate one derivative higher in `var`.
    pub fn jet_raise(&self, var: &str) -> Option<Symbol> {
        let dep = self.jet_dependent()?;
        let idx = self.jet_index()?;
        Some(Symbol::jet_from_index(dep, idx.with(var)))
    }

    /// Partial derivative of an unknown-function symbol with respect to one of its arguments.
    pub fn unknown_raise(&self, var: &str) -> Option<Symbol> {
        match &self.kind {
            SymbolKind::UnknownFunction { base, args, derivs } => {
                if args.iter().any(|a| a.as_ref() == var) {
                    Some(Symbol::unknown_derivative(base, args.clone(), derivs.with(var)))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    fn order_key(&self) -> (u8, usize, (u8, &str), &str) {
        match &self.kind {
            SymbolKind::Independent => (0, 0, var_rank(&self.name), ""),
            SymbolKind::Dependent => (1, 0, (0, ""), &self.name),
            SymbolKind::Jet { dependent, index } => (2, index.order(), (0, dependent), &self.name),
            SymbolKind::Parameter => (3, 0, (0, ""), &self.name),
            SymbolKind::UnknownFunction { base, derivs, .. } => (4, derivs.order(), (0, base), &self.name),
        }
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.kind
            .rank()
            .cmp(&other.kind.rank())
            .then_with(|| self.order_key().cmp(&other.order_key()))
            .then_with(|| self.name.cmp(&other.name))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
