//! Expected contents of testdata/nam_dict_sample.txt, written out by hand.

#![allow(dead_code)]

pub type Entry = (&'static str, &'static [(&'static str, u8)]);

/// (name key, [(gender code, [(column, rank)])]) in file order; alias entries
/// follow the entries of their own key.
pub const TABLE: &[(&str, &[Entry])] = &[
    ("andrea", &[("F", &[("DE", 13), ("AT", 9), ("CH", 8)]), ("M", &[("IT", 7), ("CH", 5)])]),
    ("john", &[("M", &[("GB", 13), ("US", 13), ("IE", 12)])]),
    ("jon", &[("M", &[("GB", 13), ("US", 13), ("IE", 12)])]),
    ("mary", &[("F", &[("GB", 12), ("US", 13), ("IE", 13)])]),
    ("jean", &[("1M", &[("FR", 12), ("BE", 11), ("CH", 7)]), ("1F", &[("GB", 3), ("US", 4)])]),
    ("kim", &[("?M", &[("DE", 2), ("DK", 5)]), ("?F", &[("US", 6), ("GB", 5)])]),
    ("sasha", &[("?", &[("RU", 5), ("UA", 4)])]),
    ("maria", &[("F", &[("IT", 13), ("ES", 13), ("PT", 13), ("DE", 9)])]),
    ("jose", &[("M", &[("ES", 13), ("PT", 11)])]),
    ("ayse", &[("F", &[("TR", 13)])]),
    ("mehmet", &[("M", &[("TR", 13), ("DE", 6)])]),
    ("wei", &[("M", &[("CN", 13)])]),
    ("fang", &[("F", &[("CN", 11)])]),
    ("yu", &[("?M", &[("CN", 9)])]),
    ("jean-pierre", &[("M", &[("FR", 10), ("BE", 6)])]),
    ("mary-ann", &[("F", &[("US", 7)])]),
    ("marianne", &[("F", &[("US", 7)])]),
    ("hans", &[("M", &[("DE", 12), ("AT", 11), ("CH", 10)])]),
    ("ingrid", &[("F", &[("DE", 7), ("SE", 9), ("NO", 10)])]),
    ("lars", &[("M", &[("SE", 12), ("NO", 12), ("DK", 11)])]),
    ("sofia", &[("F", &[("IT", 10), ("ES", 9), ("GR", 11), ("SE", 8)])]),
    ("giovanni", &[("M", &[("IT", 13)])]),
    ("giovani", &[("M", &[("IT", 13)])]),
    ("giovanna", &[("F", &[("IT", 11)])]),
    ("pierre", &[("M", &[("FR", 12), ("BE", 11), ("CH", 9)])]),
    ("marie", &[("F", &[("FR", 13), ("DE", 8), ("BE", 12)])]),
    ("luca", &[("M", &[("IT", 12), ("CH", 8)])]),
    ("robin", &[("?F", &[("DE", 3), ("NL", 4)]), ("?M", &[("GB", 6), ("US", 5)])]),
    ("alexis", &[("?", &[("FR", 4), ("US", 3)])]),
    ("ali", &[("M", &[("TR", 11), ("SA", 12), ("other", 5)])]),
    ("fatma", &[("F", &[("TR", 12)])]),
    ("ahmed", &[("M", &[("SA", 13)])]),
    ("yuki", &[("F", &[("JP", 10)])]),
    ("hiroshi", &[("M", &[("JP", 11)])]),
    ("nikola", &[("M", &[("RS", 12), ("HR", 11), ("BG", 9)]), ("1F", &[("DE", 2)])]),
    ("emma", &[("F", &[("GB", 10), ("US", 11), ("NL", 12), ("DE", 12)])]),
    ("noah", &[("M", &[("US", 11), ("NL", 10)])]),
    ("olivier", &[("M", &[("FR", 10), ("BE", 11)])]),
    ("chloe", &[("F", &[("FR", 11), ("GB", 8)])]),
    ("mateo", &[("M", &[("ES", 8)])]),
    ("lucia", &[("F", &[("ES", 11), ("IT", 9)])]),
    ("andreas", &[("M", &[("DE", 11), ("GR", 12), ("SE", 8)])]),
    ("anna", &[("F", &[("DE", 12), ("IT", 10), ("SE", 11), ("PL", 11), ("RU", 10)])]),
    ("jan", &[("M", &[("NL", 12), ("CZ", 13), ("PL", 12), ("DE", 9)])]),
    ("okka", &[("F", &[("east_frisia", 5)])]),
    ("dirk", &[("M", &[])]),
    ("zoe", &[("F", &[("other", 6)])]),
    ("sascha", &[("1M", &[("DE", 9)]), ("1F", &[])]),
    ("ewa", &[("F", &[("PL", 12)])]),
    ("piotr", &[("M", &[("PL", 12)])]),
    ("olga", &[("F", &[("RU", 12), ("UA", 11), ("BY", 11)])]),
];

/// Per-name sums over testdata/ssa (male, female).
pub const SSA_SUMS: &[(&str, u64, u64)] = &[
    ("mary", 27, 7065 + 6919 + 8148),
    ("anna", 0, 2604 + 2698),
    ("john", 9655 + 8769 + 9557, 46 + 59),
    ("andrea", 12 + 25, 1121 + 1307),
    ("kim", 40 + 260 + 300, 300 + 250),
    ("jose", 18 + 22, 0),
    ("robin", 5, 5),
];
