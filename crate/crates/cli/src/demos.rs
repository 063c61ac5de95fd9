//! Worked examples shipped with the binary.

pub struct Demo {
    pub name: &'static str,
    pub summary: &'static str,
    pub config: &'static str,
}

pub const DEMOS: &[Demo] = &[
    Demo {
        name: "soliton",
        summary: "n=1, N=1: cosh x on the free particle gives -2 sech²x",
        config: include_str!("../demos/soliton.json"),
    },
    Demo {
        name: "poschl-teller",
        summary: "n=1, N=2: cosh x, sinh 2x give -6 sech²x",
        config: include_str!("../demos/poschl-teller.json"),
    },
    Demo {
        name: "coupled-pair",
        summary: "n=2, N=2: rotated cosh/sinh columns on the free particle",
        config: include_str!("../demos/coupled-pair.json"),
    },
    Demo {
        name: "coupled-triple",
        summary: "n=2, N=3: rotated cosh/sinh/cosh columns on the free particle",
        config: include_str!("../demos/coupled-triple.json"),
    },
    Demo {
        name: "coupled-ode",
        summary: "n=2, N=2: ODE-propagated columns on a coupled Gaussian potential",
        config: include_str!("../demos/coupled-ode.json"),
    },
];

pub fn find(name: &str) -> Option<&'static Demo> {
    DEMOS.iter().find(|d| d.name == name)
}
