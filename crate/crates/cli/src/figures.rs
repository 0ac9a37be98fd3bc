//! Named presets for the figure tables.

use crate::config::{CaseTag, ConfigLayer};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureCommand {
    Profile,
    Density2d,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure {
    pub name: &'static str,
    pub command: FigureCommand,
    pub case: CaseTag,
    pub m: usize,
    /// Case 2 only.
    pub eta: u32,
    pub n1: usize,
    pub n2: usize,
    pub caption: &'static str,
}

const fn profile1(name: &'static str, m: usize, caption: &'static str) -> Figure {
    Figure {
        name,
        command: FigureCommand::Profile,
        case: CaseTag::Case1,
        m,
        eta: 0,
        n1: 0,
        n2: 0,
        caption,
    }
}

const fn profile2(name: &'static str, m: usize, eta: u32, caption: &'static str) -> Figure {
    Figure {
        name,
        command: FigureCommand::Profile,
        case: CaseTag::Case2,
        m,
        eta,
        n1: 0,
        n2: 0,
        caption,
    }
}

const fn density(name: &'static str, n1: usize, n2: usize, caption: &'static str) -> Figure {
    Figure {
        name,
        command: FigureCommand::Density2d,
        case: CaseTag::Case2,
        m: 1,
        eta: 1,
        n1,
        n2,
        caption,
    }
}

/// All presets; `b = 1` in case 1 and `alpha = 2` throughout.
pub const FIGURES: [Figure; 22] = [
    profile1("fig1a", 1, "case 1, m = 1"),
    profile1("fig1b", 2, "case 1, m = 2"),
    profile1("fig1c", 3, "case 1, m = 3"),
    profile1("fig1d", 4, "case 1, m = 4"),
    profile2("fig2a", 1, 0, "case 2, m = 1, nu = 0"),
    profile2("fig2b", 1, 1, "case 2, m = 1, nu = 2/3"),
    profile2("fig2c", 1, 2, "case 2, m = 1, nu = 4/5"),
    profile2("fig2d", 1, 3, "case 2, m = 1, nu = 6/7"),
    profile2("fig3a", 2, 0, "case 2, m = 2, nu = 0"),
    profile2("fig3b", 2, 1, "case 2, m = 2, nu = 2/3"),
    profile2("fig3c", 2, 2, "case 2, m = 2, nu = 4/5"),
    profile2("fig3d", 2, 3, "case 2, m = 2, nu = 6/7"),
    profile2("fig4a", 3, 0, "case 2, m = 3, nu = 0"),
    profile2("fig4b", 3, 1, "case 2, m = 3, nu = 2/3"),
    profile2("fig4c", 3, 2, "case 2, m = 3, nu = 4/5"),
    profile2("fig4d", 3, 3, "case 2, m = 3, nu = 6/7"),
    density("fig5a", 0, 0, "2D density, m = 1, nu = 2/3, (n1, n2) = (0, 0)"),
    density("fig5b", 1, 0, "2D density, m = 1, nu = 2/3, (n1, n2) = (1, 0)"),
    density("fig5c", 1, 1, "2D density, m = 1, nu = 2/3, (n1, n2) = (1, 1)"),
    density("fig5d", 1, 2, "2D density, m = 1, nu = 2/3, (n1, n2) = (1, 2)"),
    density("fig5e", 1, 3, "2D density, m = 1, nu = 2/3, (n1, n2) = (1, 3)"),
    density("fig5f", 2, 3, "2D density, m = 1, nu = 2/3, (n1, n2) = (2, 3)"),
];

pub fn find(name: &str) -> Option<&'static Figure> {
    FIGURES.iter().find(|f| f.name.eq_ignore_ascii_case(name))
}

impl Figure {
    pub fn layer(&self) -> ConfigLayer {
        let mut l = ConfigLayer {
            case: Some(self.case),
            alpha: Some(2.0),
            m: Some(self.m),
            vc: Some(0.0),
            ..Default::default()
        };
        match self.case {
            CaseTag::Case1 => l.b = Some(1.0),
            CaseTag::Case2 => l.eta = Some(self.eta),
        }
        if self.command == FigureCommand::Density2d {
            l.n1 = Some(self.n1);
            l.n2 = Some(self.n2);
        }
        l
    }

    pub fn subcommand(&self) -> &'static str {
        match self.command {
            FigureCommand::Profile => "profile",
            FigureCommand::Density2d => "density2d",
        }
    }
}

/// The config layer of preset `name`.
pub fn layer(name: &str) -> Result<ConfigLayer, CliError> {
    find(name).map(Figure::layer).ok_or_else(|| {
        let known: Vec<&str> = FIGURES.iter().map(|f| f.name).collect();
        CliError::Validation(format!("figure: unknown preset {name:?} (known: {})", known.join(", ")))
    })
}
