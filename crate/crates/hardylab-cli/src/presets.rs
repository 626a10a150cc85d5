//! Built-in campaign presets, embedded at compile time. A preset bundles one
//! or more campaign configs keyed to a family of bounds.

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub configs: &'static [&'static str],
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "example5",
        description: "1D weighted operator (alpha_w = 1/2, c = 4): strip integral equals eps^2.5/2.5, thm4 exponent 2.5",
        configs: &[include_str!("../presets/example5.toml")],
    },
    Preset {
        name: "interval-shrink",
        description: "interval eigenvalue drift under shrinking (thm11): sharp eps^{2/c} rate, exponent 1 at c = 2",
        configs: &[include_str!("../presets/interval-shrink.toml")],
    },
    Preset {
        name: "square-shrink",
        description: "unit-square eigenvalue drift (thm11) at h = 1/128 with grid-aligned eps",
        configs: &[include_str!("../presets/square-shrink.toml")],
    },
    Preset {
        name: "corollary8",
        description: "square + slit domains with c = 4: thm4/thm6 constants 32 and 113.8, cor7 eigenfunction bounds",
        configs: &[
            include_str!("../presets/corollary8-square.toml"),
            include_str!("../presets/corollary8-slit.toml"),
        ],
    },
    Preset {
        name: "halfline-heat",
        description: "exact half-line heat reference (halfline): quadrature vs (36 pi)^{-1/2} eps^3 t^{-3/2}",
        configs: &[include_str!("../presets/halfline-heat.toml")],
    },
    Preset {
        name: "checkerboard-alpha2",
        description: "divergence-form checkerboard, alpha = 2: hi/thm4/thm6 at c = 2 alpha, shrink rate >= 1/alpha - 0.1 (thm11)",
        configs: &[include_str!("../presets/checkerboard-alpha2.toml")],
    },
    Preset {
        name: "hardy-constants",
        description: "variational Hardy constants (hardy_constant): interval and square below the convex c = 2, L-shape below c = 4",
        configs: &[
            include_str!("../presets/hardy-interval.toml"),
            include_str!("../presets/hardy-square.toml"),
            include_str!("../presets/hardy-lshape.toml"),
        ],
    },
    Preset {
        name: "square-heat",
        description: "square heat/spectral-density strips: ker1, ker2 chain (eps-exponent >= 2.9), thm16 + Gram norm, weyl bracket",
        configs: &[include_str!("../presets/square-heat.toml")],
    },
    Preset {
        name: "interval-heat",
        description: "interval heat strips at small t (ker2): measured t-exponent -3/2 vs the bound's -2 (non-optimality)",
        configs: &[include_str!("../presets/interval-heat.toml")],
    },
    Preset {
        name: "koch-bounds",
        description: "Koch prefractal level 2 (c = 4): hi, thm4, thm6, cor7 on a prefractal boundary",
        configs: &[include_str!("../presets/koch-bounds.toml")],
    },
    Preset {
        name: "disk-bounds",
        description: "disk (convex, c = 2): hi, thm4, thm6 and the variational Hardy constant",
        configs: &[include_str!("../presets/disk-bounds.toml")],
    },
    Preset {
        name: "lshape-bounds",
        description: "L-shape (c = 4): hi, thm4, thm6, cor7 with a reentrant corner",
        configs: &[include_str!("../presets/lshape-bounds.toml")],
    },
    Preset {
        name: "lemma-chain",
        description: "interval inequality machinery: cor5 closed forms, lemma3 product rule, lemma9_10 cutoff bounds",
        configs: &[include_str!("../presets/lemma-chain.toml")],
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn listing() -> String {
    let mut s = String::new();
    for p in PRESETS {
        s.push_str(&format!("{:20} {}\n", p.name, p.description));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn all_presets_parse() {
        assert!(PRESETS.len() >= 8);
        for p in PRESETS {
            for cfg in p.configs {
                let parsed = parse_config(cfg)
                    .unwrap_or_else(|e| panic!("preset {} failed to parse: {e}", p.name));
                assert!(!parsed.checks.names.is_empty());
            }
        }
    }

    #[test]
    fn required_names_present() {
        for name in [
            "example5",
            "interval-shrink",
            "corollary8",
            "halfline-heat",
            "checkerboard-alpha2",
        ] {
            assert!(find(name).is_some(), "missing preset {name}");
        }
        let listing = listing();
        for p in PRESETS {
            assert!(listing.contains(p.name));
        }
    }
}
