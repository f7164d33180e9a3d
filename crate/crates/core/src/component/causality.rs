use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Causality, ComponentSpec, SimError, SimOptions, Simulator};
use crate::stream::{Channel, ChannelHistory, TimedStream};
use crate::value::{DataType, Value};

/// Which input values the causality search draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainChoice {
    /// Two representative values per channel (see [`DataType::two_point`]).
    TwoPoint,
    /// Every value of each channel type with at most this many values;
    /// larger types are sampled.
    Full { max_per_channel: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalityOptions {
    pub horizon: usize,
    /// Maximum number of simulated ticks for an exhaustive search, and the
    /// number of random trials otherwise.
    pub budget: usize,
    pub domains: DomainChoice,
    pub seed: u64,
    /// Mode to check against; defaults to the component's own.
    pub mode: Option<Causality>,
    pub sim: SimOptions,
}

impl Default for CausalityOptions {
    fn default() -> Self {
        CausalityOptions {
            horizon: 3,
            budget: 200_000,
            domains: DomainChoice::TwoPoint,
            seed: 0,
            mode: None,
            sim: SimOptions::default(),
        }
    }
}

/// Two input histories that agree through `agree_through` ticks while their
/// outputs differ at tick `diverges_at`.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalityCounterexample {
    pub mode: Causality,
    pub agree_through: usize,
    pub diverges_at: usize,
    pub x1: ChannelHistory,
    pub x2: ChannelHistory,
    pub y1: ChannelHistory,
    pub y2: ChannelHistory,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CausalityOutcome {
    Ok { exhaustive: bool, checked: usize },
    Counterexample(Box<CausalityCounterexample>),
}

impl CausalityOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, CausalityOutcome::Ok { .. })
    }
}

/// Searches for input histories `x1`, `x2` with `x1↓t = x2↓t` whose outputs
/// differ within `t+1` ticks (strict) or `t` ticks (weak).
///
/// The search is exhaustive when every channel domain is finite and the tree
/// of input prefixes fits in `budget` simulated ticks; otherwise it runs
/// `budget` seeded random trials. Any component executed tick by tick is
/// weakly causal, so the weak search only surfaces runtime errors.
pub fn check_causality(spec: &ComponentSpec, opts: &CausalityOptions) -> Result<CausalityOutcome, SimError> {
    let mode = opts.mode.unwrap_or_else(|| spec.effective_causality());
    let inputs = &spec.interface().inputs;
    let outputs = &spec.interface().outputs;
    let domains: Vec<Option<Vec<Value>>> = inputs
        .iter()
        .map(|c| match opts.domains {
            DomainChoice::TwoPoint => Some(c.ctype.two_point()),
            DomainChoice::Full { max_per_channel } => c.ctype.enumerate(max_per_channel),
        })
        .collect();
    let mut sim = Simulator::new(spec, opts.sim)?;
    if opts.horizon == 0 {
        return Ok(CausalityOutcome::Ok {
            exhaustive: true,
            checked: 0,
        });
    }

    if let Some(alphabet) = alphabet(&domains) {
        let a = alphabet.len() as u128;
        let mut cost: u128 = 0;
        let mut level: u128 = 1;
        for _ in 0..opts.horizon {
            level = level.saturating_mul(a);
            cost = cost.saturating_add(level);
        }
        if cost <= opts.budget as u128 {
            let mut search = Search {
                sim: &mut sim,
                alphabet: &alphabet,
                horizon: opts.horizon,
                mode,
                xs: Vec::new(),
                ys: Vec::new(),
                checked: 0,
            };
            let start = search.sim.state().clone();
            let found = search.dfs(start)?;
            let checked = search.checked;
            return Ok(match found {
                Some((t, x1, x2, y1, y2)) => CausalityOutcome::Counterexample(Box::new(CausalityCounterexample {
                    mode,
                    agree_through: t,
                    diverges_at: t + 1,
                    x1: history(inputs, &x1),
                    x2: history(inputs, &x2),
                    y1: history(outputs, &y1),
                    y2: history(outputs, &y2),
                })),
                None => CausalityOutcome::Ok { exhaustive: true, checked },
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = opts.horizon;
    for _ in 0..opts.budget {
        let x1: Vec<Vec<Value>> = (0..n).map(|_| sample_tick(&mut rng, inputs, &domains)).collect();
        let t = match mode {
            Causality::Strict => rng.gen_range(0..n),
            Causality::Weak => rng.gen_range(1..=n),
        };
        let mut x2 = x1[..t].to_vec();
        x2.extend((t..n).map(|_| sample_tick(&mut rng, inputs, &domains)));
        let y1 = run_ticks(&mut sim, &x1)?;
        let y2 = run_ticks(&mut sim, &x2)?;
        let upto = match mode {
            Causality::Strict => t + 1,
            Causality::Weak => t,
        };
        if let Some(k) = (0..upto).find(|&k| y1[k] != y2[k]) {
            return Ok(CausalityOutcome::Counterexample(Box::new(CausalityCounterexample {
                mode,
                agree_through: t,
                diverges_at: k + 1,
                x1: history(inputs, &x1),
                x2: history(inputs, &x2),
                y1: history(outputs, &y1),
                y2: history(outputs, &y2),
            })));
        }
    }
    Ok(CausalityOutcome::Ok {
        exhaustive: false,
        checked: opts.budget,
    })
}

type Found = (usize, Vec<Vec<Value>>, Vec<Vec<Value>>, Vec<Vec<Value>>, Vec<Vec<Value>>);

struct Search<'s, 'a> {
    sim: &'s mut Simulator<'a>,
    alphabet: &'s [Vec<Value>],
    horizon: usize,
    mode: Causality,
    xs: Vec<Vec<Value>>,
    ys: Vec<Vec<Value>>,
    checked: usize,
}

impl Search<'_, '_> {
    fn dfs(&mut self, state: super::ComponentState) -> Result<Option<Found>, SimError> {
        let depth = self.xs.len();
        if depth == self.horizon {
            return Ok(None);
        }
        let mut first: Option<(usize, Vec<Value>)> = None;
        for (ai, a) in self.alphabet.iter().enumerate() {
            self.sim.set_state(state.clone());
            let y = self.sim.step_slice(a)?;
            self.checked += 1;
            let next = self.sim.state().clone();
            if self.mode == Causality::Strict {
                match &first {
                    None => first = Some((ai, y.clone())),
                    Some((fi, fy)) if *fy != y => {
                        let mut x1 = self.xs.clone();
                        x1.push(self.alphabet[*fi].clone());
                        let mut x2 = self.xs.clone();
                        x2.push(a.clone());
                        let mut y1 = self.ys.clone();
                        y1.push(fy.clone());
                        let mut y2 = self.ys.clone();
                        y2.push(y);
                        return Ok(Some((depth, x1, x2, y1, y2)));
                    }
                    Some(_) => {}
                }
            }
            self.xs.push(a.clone());
            self.ys.push(y);
            let found = self.dfs(next)?;
            self.xs.pop();
            self.ys.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}

fn alphabet(domains: &[Option<Vec<Value>>]) -> Option<Vec<Vec<Value>>> {
    let mut out: Vec<Vec<Value>> = alloc::vec![Vec::new()];
    for d in domains {
        let d = d.as_ref()?;
        if out.len().saturating_mul(d.len()) > 1 << 20 {
            return None;
        }
        out = out
            .iter()
            .flat_map(|prefix| {
                d.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect();
    }
    Some(out)
}

fn sample_value(rng: &mut ChaCha8Rng, ty: &DataType) -> Value {
    match ty {
        DataType::Bool => Value::Bool(rng.gen()),
        DataType::Int { lo, hi } => Value::Int(rng.gen_range(*lo..=*hi)),
        DataType::Real => Value::real(rng.gen_range(-1000.0..=1000.0)),
        DataType::Enum(ls) => Value::Enum(ls[rng.gen_range(0..ls.len())].clone()),
    }
}

fn sample_tick(rng: &mut ChaCha8Rng, inputs: &[Channel], domains: &[Option<Vec<Value>>]) -> Vec<Value> {
    inputs
        .iter()
        .zip(domains)
        .map(|(c, d)| match d {
            Some(vals) if !vals.is_empty() => vals[rng.gen_range(0..vals.len())].clone(),
            _ => sample_value(rng, &c.ctype),
        })
        .collect()
}

fn run_ticks(sim: &mut Simulator<'_>, xs: &[Vec<Value>]) -> Result<Vec<Vec<Value>>, SimError> {
    sim.reset();
    xs.iter().map(|x| sim.step_slice(x)).collect()
}

fn history(channels: &[Channel], ticks: &[Vec<Value>]) -> ChannelHistory {
    let mut h = ChannelHistory::new(ticks.len());
    for (k, c) in channels.iter().enumerate() {
        let vals = ticks.iter().map(|t| t[k].clone()).collect();
        let s = TimedStream::new(c.ctype.clone(), vals).expect("values come from the channel domain");
        h.insert(c.name.clone(), s).expect("uniform horizon");
    }
    h
}
