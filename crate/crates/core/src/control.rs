//! Open-loop control signals, sampled at whatever times an integrator asks.

use std::fmt;

use nalgebra::DVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wave {
    Sin,
    Cos,
}

/// One scalar input channel. Sinusoid frequencies are angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Signal {
    Zero,
    Constant(f64),
    Sinusoid {
        wave: Wave,
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
}

impl Signal {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Signal::Zero => 0.0,
            Signal::Constant(a) => a,
            Signal::Sinusoid {
                wave,
                amplitude,
                omega,
                phase,
            } => {
                let arg = omega * t + phase;
                amplitude
                    * match wave {
                        Wave::Sin => arg.sin(),
                        Wave::Cos => arg.cos(),
                    }
            }
        }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Signal::Zero => f.write_str("zero"),
            Signal::Constant(a) => write!(f, "constant({a})"),
            Signal::Sinusoid {
                wave,
                amplitude,
                omega,
                phase,
            } => {
                let name = match wave {
                    Wave::Sin => "sin",
                    Wave::Cos => "cos",
                };
                write!(f, "{amplitude}*{name}({omega}*t + {phase})")
            }
        }
    }
}

/// A signal per control channel.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ControlSpec {
    pub channels: Vec<Signal>,
}

impl ControlSpec {
    pub fn zero(channels: usize) -> Self {
        Self {
            channels: vec![Signal::Zero; channels],
        }
    }

    pub fn new(channels: Vec<Signal>) -> Self {
        Self { channels }
    }

    pub fn eval(&self, t: f64) -> DVector<f64> {
        DVector::from_iterator(self.channels.len(), self.channels.iter().map(|s| s.eval(t)))
    }

    pub fn as_fn(&self) -> impl Fn(f64) -> DVector<f64> + Sync + '_ {
        move |t| self.eval(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sinusoids_use_angular_frequency() {
        let s = Signal::Sinusoid {
            wave: Wave::Cos,
            amplitude: 1.0,
            omega: 20.0 * PI,
            phase: 0.0,
        };
        assert!((s.eval(0.05) + 1.0).abs() < 1e-12);
        let spec = ControlSpec::new(vec![s, Signal::Constant(2.0), Signal::Zero]);
        let u = spec.eval(0.1);
        assert!((u[0] - 1.0).abs() < 1e-12);
        assert_eq!(u[1], 2.0);
        assert_eq!(u[2], 0.0);
    }
}
