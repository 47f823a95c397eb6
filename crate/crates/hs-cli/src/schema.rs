//! JSON schemas for data, dissipation profiles and solver outputs.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use hs_core::eulerian::{AlphaFunction, EnergyMeasure, InitialData, WaveProfile};
use hs_core::exact;
use hs_core::lagrangian::{EulerianSolution, LagrangianGrid};
use hs_core::projection::ProjectedData;
use hs_core::pwl::{Breakpoint, PiecewiseLinearFn};

/// Wave-profile input: an explicit breakpoint table or a named builtin.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileSpec {
    Builtin {
        builtin: String,
    },
    Breakpoints {
        breakpoints: Vec<(f64, f64)>,
        #[serde(default)]
        left: Option<f64>,
        #[serde(default)]
        right: Option<f64>,
    },
}

/// Initial-data input schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DataSpec {
    pub u: ProfileSpec,
    #[serde(default)]
    pub atoms: Vec<(f64, f64)>,
    #[serde(default)]
    pub sc_table: Vec<(f64, f64)>,
}

impl DataSpec {
    pub fn build(&self) -> Result<InitialData> {
        let (profile, mut atoms) = match &self.u {
            ProfileSpec::Builtin { builtin } => match builtin.as_str() {
                "ex41" => {
                    let data = exact::ex41_data();
                    (data.profile, data.measure.atoms)
                }
                "ex42" => (exact::ex42_data().profile, Vec::new()),
                "cusp" => (WaveProfile::Cusp, Vec::new()),
                other => bail!("unknown builtin profile {other:?}"),
            },
            ProfileSpec::Breakpoints {
                breakpoints,
                left,
                right,
            } => {
                let profile = WaveProfile::piecewise_linear(breakpoints)?;
                if let Some(l) = left {
                    let first = breakpoints.first().map(|p| p.1);
                    if first != Some(*l) {
                        bail!("left tail {l} disagrees with the first breakpoint value");
                    }
                }
                if let Some(r) = right {
                    let last = breakpoints.last().map(|p| p.1);
                    if last != Some(*r) {
                        bail!("right tail {r} disagrees with the last breakpoint value");
                    }
                }
                (profile, Vec::new())
            }
        };
        atoms.extend(self.atoms.iter().copied());
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let sc = if self.sc_table.is_empty() {
            None
        } else {
            Some(PiecewiseLinearFn::continuous(&self.sc_table)?)
        };
        Ok(InitialData::new(profile, EnergyMeasure { atoms, sc })?)
    }
}

/// Dissipation-profile input schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Builtin {
        builtin: String,
    },
    Const {
        #[serde(rename = "const")]
        value: f64,
    },
    Table {
        breakpoints: Vec<(f64, f64)>,
        lipschitz: f64,
    },
}

impl AlphaSpec {
    pub fn build(&self) -> Result<AlphaFunction> {
        Ok(match self {
            AlphaSpec::Builtin { builtin } => match builtin.as_str() {
                "alpha1" => AlphaFunction::Alpha1,
                "alpha2" => AlphaFunction::Alpha2,
                "ex42" => AlphaFunction::Ex42,
                "cusp" => exact::cusp_alpha(0.95),
                other => bail!("unknown builtin alpha {other:?}"),
            },
            AlphaSpec::Const { value } => {
                if !(0.0..=1.0).contains(value) {
                    bail!("constant alpha must lie in [0, 1]");
                }
                AlphaFunction::Const(*value)
            }
            AlphaSpec::Table {
                breakpoints,
                lipschitz,
            } => AlphaFunction::Table {
                table: PiecewiseLinearFn::continuous(breakpoints)?,
                lipschitz: *lipschitz,
            },
        })
    }
}

/// Parses an alpha argument: a JSON file path, a builtin name
/// (`alpha1|alpha2|ex42|cusp`), or `const:<value>`.
pub fn parse_alpha_arg(arg: &str) -> Result<AlphaFunction> {
    if std::path::Path::new(arg).exists() {
        let text = std::fs::read_to_string(arg)
            .with_context(|| format!("reading alpha file {arg}"))?;
        let spec: AlphaSpec = serde_json::from_str(&text)?;
        return spec.build();
    }
    if let Some(v) = arg.strip_prefix("const:") {
        let value: f64 = v.parse().context("parsing constant alpha value")?;
        return AlphaSpec::Const { value }.build();
    }
    AlphaSpec::Builtin {
        builtin: arg.to_string(),
    }
    .build()
}

/// Loads initial data from a JSON file or a builtin name.
pub fn parse_data_arg(arg: &str) -> Result<InitialData> {
    if std::path::Path::new(arg).exists() {
        let text =
            std::fs::read_to_string(arg).with_context(|| format!("reading data file {arg}"))?;
        let spec: DataSpec = serde_json::from_str(&text)?;
        return spec.build();
    }
    match arg {
        "ex41" => Ok(exact::ex41_data()),
        "ex42" => Ok(exact::ex42_data()),
        "cusp" => Ok(exact::cusp_data()),
        other => Err(anyhow!(
            "data argument {other:?} is neither a file nor a builtin (ex41|ex42|cusp)"
        )),
    }
}

/// Serialized projected data; mirrors the per-double-cell fields.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectionJson {
    pub dx: f64,
    pub j_min: i64,
    pub u_left_tail: f64,
    pub u_right_tail: f64,
    pub f_sing_left: f64,
    pub f_total: f64,
    pub cells: Vec<CellJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellJson {
    pub x_left: f64,
    pub u_left: f64,
    pub du: f64,
    pub q: f64,
    pub sign: f64,
    pub f_ac_left: f64,
    pub f_sing_right: f64,
}

impl ProjectionJson {
    pub fn from_core(proj: &ProjectedData) -> Self {
        Self {
            dx: proj.dx,
            j_min: proj.j_min,
            u_left_tail: proj.u_left_tail,
            u_right_tail: proj.u_right_tail,
            f_sing_left: proj.f_sing_left,
            f_total: proj.f_total(),
            cells: proj
                .cells
                .iter()
                .enumerate()
                .map(|(i, c)| CellJson {
                    x_left: proj.x_left(i),
                    u_left: c.u_left,
                    du: c.du,
                    q: c.q,
                    sign: c.sign,
                    f_ac_left: c.f_ac_left,
                    f_sing_right: c.f_sing_right,
                })
                .collect(),
        }
    }
}

/// Serialized Lagrangian grid (`--dump-lagrangian`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LagrangianJson {
    pub t: f64,
    pub xi: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub h: Vec<f64>,
    pub dy: Vec<f64>,
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
    pub dh: Vec<f64>,
    pub tau: Vec<f64>,
    pub zeta_minus: f64,
    pub u_minus: f64,
}

impl LagrangianJson {
    pub fn from_core(grid: &LagrangianGrid) -> Self {
        Self {
            t: grid.t,
            xi: grid.xi.clone(),
            y: grid.y.clone(),
            u: grid.u.clone(),
            v: grid.v.clone(),
            h: grid.h.clone(),
            dy: grid.dy.clone(),
            du: grid.du.clone(),
            dv: grid.dv.clone(),
            dh: grid.dh.clone(),
            tau: grid.tau.clone(),
            zeta_minus: grid.zeta_minus,
            u_minus: grid.u_minus,
        }
    }
}

/// Serialized piecewise linear function with jumps.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PwlJson {
    /// `(x, left value, right value)` triples.
    pub breakpoints: Vec<(f64, f64, f64)>,
    pub left: f64,
    pub right: f64,
}

impl PwlJson {
    pub fn from_core(f: &PiecewiseLinearFn) -> Self {
        Self {
            breakpoints: f.points().iter().map(|p| (p.x, p.left, p.right)).collect(),
            left: f.left_tail(),
            right: f.right_tail(),
        }
    }

    pub fn to_core(&self) -> Result<PiecewiseLinearFn> {
        Ok(PiecewiseLinearFn::with_jumps(
            self.breakpoints
                .iter()
                .map(|&(x, left, right)| Breakpoint { x, left, right })
                .collect(),
        )?)
    }
}

/// Serialized Eulerian snapshot.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionJson {
    pub t: f64,
    pub u: PwlJson,
    pub f: PwlJson,
    pub g: PwlJson,
}

impl SolutionJson {
    pub fn from_core(sol: &EulerianSolution) -> Self {
        Self {
            t: sol.t,
            u: PwlJson::from_core(&sol.u),
            f: PwlJson::from_core(&sol.f),
            g: PwlJson::from_core(&sol.g),
        }
    }
}

/// Writes a snapshot as CSV with columns `x,u,F`; jump points emit two rows
/// (left and right limit).
pub fn write_solution_csv<W: std::io::Write>(sol: &EulerianSolution, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "u", "F"])?;
    for p in sol.f.points() {
        let u = sol.u.eval(p.x);
        w.write_record([fmt17(p.x), fmt17(u), fmt17(p.left)])?;
        if p.right != p.left {
            w.write_record([fmt17(p.x), fmt17(u), fmt17(p.right)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Per-cell rescaling-analysis output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalysisJson {
    pub dx: f64,
    pub cells: Vec<AnalysisCellJson>,
    pub max_length_gap: f64,
    pub max_vs_half_sing: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalysisCellJson {
    pub x_left: f64,
    pub x_right: f64,
    pub sing_mass: f64,
    pub b_proj_meas: f64,
    pub b_proj_content: f64,
    pub b_exact_meas: f64,
    pub b_exact_content: f64,
}

/// 17 significant digits, locale independent.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}
