//! Built-in scenarios reproducing the standard worked examples.

use super::{parse_scenario, ScenarioDoc};

const EQ10_BORN: &str = "\
# Born weights of |z+> in the z, x and y frameworks
scenario eq10-born
[system]
spins 1
[state]
z+
[grid]
times 0 1
[schedule]
free
[family z-framework]
collapse z
[family x-framework]
collapse x
[family y-framework]
collapse y
";

const EQ23: &str = "\
# three-time family on a free spin: C1/C3 and C2/C4 interfere
scenario eq23
[system]
spins 1
[state]
z+
[grid]
times 0 1 2
[schedule]
free
[family main]
x1+ z2+
x1+ z2-
x1- z2+
x1- z2-
";

const EQ23_IDENTITY_FIX: &str = "\
# final events replaced by the identity, duplicates merged
scenario eq23-identity-fix
[system]
spins 1
[state]
z+
[grid]
times 0 1 2
[schedule]
free
[family main]
x1+ 1
x1- 1
";

// One choice of field: H = (pi/2) S_y on [0, 2) turns |z+> into |x+> at t1
// and into |z-> at t2.
const EQ23_FIELD_FIX: &str = "\
# same histories under a rotating field; only C2 survives
scenario eq23-field-fix
[system]
spins 1
[state]
z+
[grid]
times 0 1 2
[schedule]
segment 0 2 1.5707963267948966 Sy
[family main]
x1+ z2+
x1+ z2-
x1- z2+
x1- z2-
";

const EQ25_RANDOM_DIRECTIONS: &str = "\
# singlet, spin A along w and spin B along v at t1
scenario eq25-random-directions
[system]
spins 2
[state]
singlet
[grid]
times 0 1
[schedule]
free
[family main]
w(1.1,0.4)A1+ w(2.3,5.1)B1+
w(1.1,0.4)A1- w(2.3,5.1)B1+
w(1.1,0.4)A1+ w(2.3,5.1)B1-
w(1.1,0.4)A1- w(2.3,5.1)B1-
[family same-axis]
zA1+ zB1+
zA1- zB1+
zA1+ zB1-
zA1- zB1-
";

const EQ26_UNITARY: &str = "\
scenario eq26-unitary
[system]
spins 2
[state]
singlet
[grid]
times 0 1 2
[schedule]
free
[family unitary]
unitary
";

const EQ27_SPLIT: &str = "\
# split at t1 along z, then unitary continuation
scenario eq27-split
[system]
spins 2
[state]
singlet
[grid]
times 0 1 2
[schedule]
free
[family split-t1]
zA1+ zB1- zA2+ zB2-
zA1- zB1+ zA2- zB2+
[family split-t2]
1 zA2+ zB2-
1 zA2- zB2+
";

const EQ28_SIXTEEN: &str = "\
# x on A and z on B at t1, then z on A and x on B at t2
scenario eq28-sixteen
[system]
spins 2
[state]
singlet
[grid]
times 0 1 2
[schedule]
free
[family main]
xA1+ zB1+ zA2+ xB2+
xA1+ zB1+ zA2- xB2+
xA1+ zB1+ zA2+ xB2-
xA1+ zB1+ zA2- xB2-
xA1- zB1+ zA2+ xB2+
xA1- zB1+ zA2- xB2+
xA1- zB1+ zA2+ xB2-
xA1- zB1+ zA2- xB2-
xA1+ zB1- zA2+ xB2+
xA1+ zB1- zA2- xB2+
xA1+ zB1- zA2+ xB2-
xA1+ zB1- zA2- xB2-
xA1- zB1- zA2+ xB2+
xA1- zB1- zA2- xB2+
xA1- zB1- zA2+ xB2-
xA1- zB1- zA2- xB2-
";

const EQ29_UNITARY: &str = "\
# a spin precessing about x; one history with probability 1
scenario eq29-unitary
[system]
spins 1
[state]
z+
[grid]
times 0 1 2 3
[schedule]
segment 0 3 0.8 Sx
[family unitary]
unitary
";

const EQ30_COLLAPSE_X: &str = "\
scenario eq30-collapse-x
[system]
spins 1
[state]
z+
[grid]
times 0 1 2
[schedule]
free
[family collapse]
collapse x
";

const CAT_ANALOGUE: &str = "\
# |z+> described in the z-framework (no x values) and the x-framework
scenario cat-analogue
[system]
spins 1
[state]
z+
[grid]
times 0 1
[schedule]
free
[family z-framework]
collapse z
[family x-framework]
collapse x
";

// a = z, a' = x, b and b' at 45 and 135 degrees in the x-z plane
const CHSH_DEMO: &str = "\
# singlet joint distributions at the four CHSH setting pairs
scenario chsh-demo
[system]
spins 2
[state]
singlet
[grid]
times 0 1
[schedule]
free
[family a-b]
zA1+ w(0.7853981633974483,0)B1+
zA1- w(0.7853981633974483,0)B1+
zA1+ w(0.7853981633974483,0)B1-
zA1- w(0.7853981633974483,0)B1-
[family a-b2]
zA1+ w(2.356194490192345,0)B1+
zA1- w(2.356194490192345,0)B1+
zA1+ w(2.356194490192345,0)B1-
zA1- w(2.356194490192345,0)B1-
[family a2-b]
xA1+ w(0.7853981633974483,0)B1+
xA1- w(0.7853981633974483,0)B1+
xA1+ w(0.7853981633974483,0)B1-
xA1- w(0.7853981633974483,0)B1-
[family a2-b2]
xA1+ w(2.356194490192345,0)B1+
xA1- w(2.356194490192345,0)B1+
xA1+ w(2.356194490192345,0)B1-
xA1- w(2.356194490192345,0)B1-
";

const BUILTINS: &[(&str, &str)] = &[
    ("eq10-born", EQ10_BORN),
    ("eq23", EQ23),
    ("eq23-identity-fix", EQ23_IDENTITY_FIX),
    ("eq23-field-fix", EQ23_FIELD_FIX),
    ("eq25-random-directions", EQ25_RANDOM_DIRECTIONS),
    ("eq26-unitary", EQ26_UNITARY),
    ("eq27-split", EQ27_SPLIT),
    ("eq28-sixteen", EQ28_SIXTEEN),
    ("eq29-unitary", EQ29_UNITARY),
    ("eq30-collapse-x", EQ30_COLLAPSE_X),
    ("cat-analogue", CAT_ANALOGUE),
    ("chsh-demo", CHSH_DEMO),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn builtin(name: &str) -> Option<ScenarioDoc> {
    builtin_source(name).map(|s| parse_scenario(s).expect("built-in scenarios parse"))
}

pub fn builtin_scenarios() -> Vec<ScenarioDoc> {
    BUILTINS
        .iter()
        .map(|(_, s)| parse_scenario(s).expect("built-in scenarios parse"))
        .collect()
}
