use num_complex::Complex64;

use super::{ActivationKind, LayerSpec, Mode};
use crate::error::{Error, Result};

/// Location of one occurrence of a bound parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    /// Real part of a weight entry.
    Weight { body: usize, row: usize, entry: usize },
    /// Parameter of a threshold gate.
    Threshold { body: usize, neuron: usize },
}

/// A named scalar parameter shared by every slot it lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Binding {
    pub name: String,
    pub slots: Vec<Slot>,
}

/// Layers stored as distinct bodies plus the order they are applied in.
///
/// A body may appear many times in `sequence`; all occurrences share storage,
/// so a parameter bound in a body is shared by every repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    bodies: Vec<LayerSpec>,
    sequence: Vec<usize>,
    bindings: Vec<Binding>,
}

impl NetworkSpec {
    pub fn new(bodies: Vec<LayerSpec>, sequence: Vec<usize>, bindings: Vec<Binding>) -> Result<Self> {
        if sequence.is_empty() {
            return Err(Error::Config("network has no layers".into()));
        }
        if let Some(&b) = sequence.iter().find(|&&b| b >= bodies.len()) {
            return Err(Error::Config(format!("sequence references missing body {b}")));
        }
        for (i, w) in sequence.windows(2).enumerate() {
            let (a, b) = (&bodies[w[0]], &bodies[w[1]]);
            if a.out_dim() != b.in_dim() {
                return Err(Error::Config(format!(
                    "layer {i} outputs {} values but layer {} expects {}",
                    a.out_dim(),
                    i + 1,
                    b.in_dim()
                )));
            }
        }
        let net = NetworkSpec {
            bodies,
            sequence,
            bindings,
        };
        for (i, b) in net.bindings.iter().enumerate() {
            if b.slots.is_empty() {
                return Err(Error::Config(format!("binding {} has no slots", b.name)));
            }
            let first = net.slot_value(&b.slots[0])?;
            for s in &b.slots[1..] {
                if net.slot_value(s)? != first {
                    return Err(Error::Config(format!(
                        "binding {i} ({}) has inconsistent values",
                        b.name
                    )));
                }
            }
        }
        Ok(net)
    }

    fn slot_value(&self, slot: &Slot) -> Result<f64> {
        match *slot {
            Slot::Weight { body, row, entry } => {
                let l = self
                    .bodies
                    .get(body)
                    .ok_or_else(|| Error::Config(format!("slot body {body} missing")))?;
                if row >= l.out_dim() || !l.row_range(row).contains(&entry) {
                    return Err(Error::Config(format!(
                        "weight slot ({body}, {row}, {entry}) out of range"
                    )));
                }
                Ok(l.vals()[entry].re)
            }
            Slot::Threshold { body, neuron } => {
                let l = self
                    .bodies
                    .get(body)
                    .ok_or_else(|| Error::Config(format!("slot body {body} missing")))?;
                match l.activations().get(neuron) {
                    Some(ActivationKind::ThresholdGate(t)) => Ok(*t),
                    _ => Err(Error::Config(format!(
                        "threshold slot ({body}, {neuron}) is not a threshold gate"
                    ))),
                }
            }
        }
    }

    pub fn bodies(&self) -> &[LayerSpec] {
        &self.bodies
    }

    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    pub fn bindings(&self) -> &[Binding] {
        &self.bindings
    }

    pub fn layer_count(&self) -> usize {
        self.sequence.len()
    }

    pub fn layer(&self, i: usize) -> &LayerSpec {
        &self.bodies[self.sequence[i]]
    }

    pub fn input_dim(&self) -> usize {
        self.layer(0).in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layer(self.layer_count() - 1).out_dim()
    }

    pub fn param_count(&self) -> usize {
        self.bindings.len()
    }

    /// Current value of every binding, in binding order.
    pub fn param_values(&self) -> Vec<f64> {
        self.bindings
            .iter()
            .map(|b| self.slot_value(&b.slots[0]).expect("validated"))
            .collect()
    }

    /// Writes `value` into every slot of binding `index`.
    pub fn set_param(&mut self, index: usize, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::Config(format!("parameter value {value} is not finite")));
        }
        let slots = self
            .bindings
            .get(index)
            .ok_or_else(|| Error::Config(format!("no binding {index}")))?
            .slots
            .clone();
        for s in slots {
            match s {
                Slot::Weight { body, entry, .. } => self.bodies[body].set_entry_re(entry, value),
                Slot::Threshold { body, neuron } => self.bodies[body].set_threshold(neuron, value),
            }
        }
        Ok(())
    }

    pub fn set_params(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.bindings.len() {
            return Err(Error::Dimension {
                expected: self.bindings.len(),
                got: values.len(),
            });
        }
        for (i, &v) in values.iter().enumerate() {
            self.set_param(i, v)?;
        }
        Ok(())
    }

    /// Overwrites one weight entry without regard to bindings.
    pub fn set_weight_entry(&mut self, body: usize, entry: usize, value: Complex64) -> Result<()> {
        let l = self
            .bodies
            .get_mut(body)
            .ok_or_else(|| Error::Config(format!("no body {body}")))?;
        if entry >= l.nnz() || !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Config(format!("cannot set entry {entry} of body {body}")));
        }
        l.set_entry(entry, value);
        Ok(())
    }
}

/// Everything [`backward`] needs from a forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub mode: Mode,
    pub input: Vec<Complex64>,
    pub pre: Vec<Vec<Complex64>>,
    pub post: Vec<Vec<Complex64>>,
}

impl ForwardTrace {
    pub fn output(&self) -> &[Complex64] {
        self.post.last().expect("at least one layer")
    }
}

fn check_mode(mode: Mode) -> Result<()> {
    match mode {
        Mode::Relaxed { tau } if !(tau.is_finite() && tau > 0.0) => {
            Err(Error::Config(format!("temperature {tau} must be positive")))
        }
        _ => Ok(()),
    }
}

/// Runs the network and keeps every intermediate vector.
pub fn forward(
    net: &NetworkSpec,
    input: &[Complex64],
    mode: Mode,
) -> Result<(Vec<Complex64>, ForwardTrace)> {
    check_mode(mode)?;
    if input.len() != net.input_dim() {
        return Err(Error::Dimension {
            expected: net.input_dim(),
            got: input.len(),
        });
    }
    let mut pre = Vec::with_capacity(net.layer_count());
    let mut post: Vec<Vec<Complex64>> = Vec::with_capacity(net.layer_count());
    for i in 0..net.layer_count() {
        let h = if i == 0 { input } else { &post[i - 1] };
        let (z, y) = net.layer(i).eval(h, mode, i)?;
        pre.push(z);
        post.push(y);
    }
    let out = post.last().expect("nonempty").clone();
    Ok((
        out,
        ForwardTrace {
            mode,
            input: input.to_vec(),
            pre,
            post,
        },
    ))
}

/// Runs the network keeping only the output.
pub fn forward_output(net: &NetworkSpec, input: &[Complex64], mode: Mode) -> Result<Vec<Complex64>> {
    forward_range(net, input, mode, 0..net.layer_count())
}

/// Runs layers `range` of the network on `input`, keeping only the output.
pub fn forward_range(
    net: &NetworkSpec,
    input: &[Complex64],
    mode: Mode,
    range: std::ops::Range<usize>,
) -> Result<Vec<Complex64>> {
    check_mode(mode)?;
    let first = net.layer(range.start);
    if input.len() != first.in_dim() {
        return Err(Error::Dimension {
            expected: first.in_dim(),
            got: input.len(),
        });
    }
    let mut h = input.to_vec();
    for i in range {
        h = net.layer(i).eval(&h, mode, i)?.1;
    }
    Ok(h)
}

/// Gradient of a real loss with respect to every binding.
///
/// `output_grad[n]` packs `(∂L/∂Re y_n, ∂L/∂Im y_n)`. Complex values are
/// treated as pairs of reals; contributions from every slot and every
/// repetition of a body are summed.
pub fn backward(
    net: &NetworkSpec,
    trace: &ForwardTrace,
    output_grad: &[Complex64],
) -> Result<Vec<f64>> {
    let tau = match trace.mode {
        Mode::Hard => return Err(Error::HardModeTrace),
        Mode::Relaxed { tau } => tau,
    };
    if trace.pre.len() != net.layer_count() || trace.post.len() != net.layer_count() {
        return Err(Error::Dimension {
            expected: net.layer_count(),
            got: trace.pre.len(),
        });
    }
    if output_grad.len() != net.output_dim() {
        return Err(Error::Dimension {
            expected: net.output_dim(),
            got: output_grad.len(),
        });
    }
    let nb = net.bodies.len();
    let mut weight_slots: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); nb];
    let mut thr_slots: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nb];
    for (i, b) in net.bindings.iter().enumerate() {
        for s in &b.slots {
            match *s {
                Slot::Weight { body, row, entry } => weight_slots[body].push((row, entry, i)),
                Slot::Threshold { body, neuron } => thr_slots[body].push((neuron, i)),
            }
        }
    }

    let mut grads = vec![0.0; net.bindings.len()];
    let mut gy = output_grad.to_vec();
    let mut gz = Vec::new();
    for pos in (0..net.layer_count()).rev() {
        let bi = net.sequence[pos];
        let layer = &net.bodies[bi];
        let z = &trace.pre[pos];
        let h: &[Complex64] = if pos == 0 { &trace.input } else { &trace.post[pos - 1] };
        if z.len() != layer.out_dim() || h.len() != layer.in_dim() {
            return Err(Error::Dimension {
                expected: layer.out_dim(),
                got: z.len(),
            });
        }
        gz.clear();
        gz.extend(
            z.iter()
                .zip(&gy)
                .zip(layer.activations())
                .map(|((z, g), a)| a.relaxed_vjp(*z, *g, tau)),
        );
        for &(neuron, b) in &thr_slots[bi] {
            grads[b] += layer.activations()[neuron].threshold_grad(z[neuron], gy[neuron], tau);
        }
        let cols = layer.cols();
        for &(row, entry, b) in &weight_slots[bi] {
            grads[b] += (gz[row] * h[cols[entry]].conj()).re;
        }
        if pos > 0 {
            let vals = layer.vals();
            let mut gh = vec![Complex64::new(0.0, 0.0); layer.in_dim()];
            for (r, g) in gz.iter().enumerate() {
                if *g == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for e in layer.row_range(r) {
                    gh[cols[e]] += vals[e].conj() * g;
                }
            }
            gy = gh;
        }
    }
    Ok(grads)
}

/// Outcome of [`finite_diff_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct FdReport {
    pub max_rel_error: f64,
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
}

/// Compares [`backward`] against central differences of `loss`.
///
/// `loss` maps an output vector to its value and its packed gradient. The
/// error for each parameter is `|analytic − numeric| / (|numeric| + floor)`.
pub fn finite_diff_check(
    net: &NetworkSpec,
    input: &[Complex64],
    loss: &dyn Fn(&[Complex64]) -> (f64, Vec<Complex64>),
    tau: f64,
    step: f64,
    floor: f64,
) -> Result<FdReport> {
    let mode = Mode::relaxed(tau)?;
    let (out, trace) = forward(net, input, mode)?;
    let (_, g) = loss(&out);
    let analytic = backward(net, &trace, &g)?;
    let mut probe = net.clone();
    let base = net.param_values();
    let mut numeric = Vec::with_capacity(base.len());
    let mut max_rel_error = 0.0f64;
    for (i, &p) in base.iter().enumerate() {
        probe.set_param(i, p + step)?;
        let up = loss(&forward_output(&probe, input, mode)?).0;
        probe.set_param(i, p - step)?;
        let down = loss(&forward_output(&probe, input, mode)?).0;
        probe.set_param(i, p)?;
        let n = (up - down) / (2.0 * step);
        max_rel_error = max_rel_error.max((analytic[i] - n).abs() / (n.abs() + floor));
        numeric.push(n);
    }
    Ok(FdReport {
        max_rel_error,
        analytic,
        numeric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sq_loss(target: Vec<Complex64>) -> impl Fn(&[Complex64]) -> (f64, Vec<Complex64>) {
        move |y: &[Complex64]| {
            let mut l = 0.0;
            let mut g = Vec::with_capacity(y.len());
            for (a, t) in y.iter().zip(&target) {
                let d = a - t;
                l += d.norm_sqr();
                g.push(d * 2.0);
            }
            (l, g)
        }
    }

    fn linear_net() -> NetworkSpec {
        let l0 = LayerSpec::new(
            2,
            vec![
                vec![(0, c(0.5, 0.0)), (1, c(0.0, 1.0))],
                vec![(1, c(-1.5, 0.0))],
            ],
            vec![c(0.1, 0.2), c(0.0, 0.0)],
            vec![ActivationKind::Identity; 2],
        )
        .unwrap();
        let l1 = LayerSpec::new(
            2,
            vec![vec![(0, c(2.0, 0.0)), (1, c(0.7, 0.0))]],
            vec![c(0.0, 0.0)],
            vec![ActivationKind::Identity],
        )
        .unwrap();
        NetworkSpec::new(
            vec![l0, l1],
            vec![0, 1],
            vec![
                Binding {
                    name: "a".into(),
                    slots: vec![Slot::Weight { body: 0, row: 0, entry: 0 }],
                },
                Binding {
                    name: "b".into(),
                    slots: vec![Slot::Weight { body: 1, row: 0, entry: 1 }],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn linear_gradients_are_analytic() {
        let net = linear_net();
        let x = [c(1.0, -0.5), c(0.3, 2.0)];
        let (y, tr) = forward(&net, &x, Mode::relaxed(1.0).unwrap()).unwrap();
        // y = 2(0.5 x0 + i x1 + b0) + 0.7(-1.5 x1); L = Re(y) so dL/dy = (1, 0).
        let g = backward(&net, &tr, &[c(1.0, 0.0)]).unwrap();
        assert_eq!(g[0], 2.0 * x[0].re);
        assert_eq!(g[1], tr.post[0][1].re);
        assert_eq!(y.len(), 1);
    }

    #[test]
    fn hard_trace_rejected() {
        let net = linear_net();
        let (_, tr) = forward(&net, &[c(1.0, 0.0), c(0.0, 0.0)], Mode::Hard).unwrap();
        assert_eq!(backward(&net, &tr, &[c(1.0, 0.0)]), Err(Error::HardModeTrace));
    }

    #[test]
    fn linear_finite_differences_agree() {
        let net = linear_net();
        let x = [c(1.0, -0.5), c(0.3, 2.0)];
        let r = finite_diff_check(&net, &x, &sq_loss(vec![c(0.2, 0.1)]), 1.0, 1e-5, 1e-8).unwrap();
        assert!(r.max_rel_error < 1e-8, "{r:?}");
    }

    #[test]
    fn shared_binding_sums_gradients() {
        let gate = |t| {
            LayerSpec::new(
                1,
                vec![vec![(0, c(1.3, 0.0))]],
                vec![c(0.0, 0.5)],
                vec![ActivationKind::ThresholdGate(t)],
            )
            .unwrap()
        };
        let shared = NetworkSpec::new(
            vec![gate(0.4)],
            vec![0, 0],
            vec![
                Binding {
                    name: "w".into(),
                    slots: vec![Slot::Weight { body: 0, row: 0, entry: 0 }],
                },
                Binding {
                    name: "t".into(),
                    slots: vec![Slot::Threshold { body: 0, neuron: 0 }],
                },
            ],
        )
        .unwrap();
        let split = NetworkSpec::new(
            vec![gate(0.4), gate(0.4)],
            vec![0, 1],
            vec![
                Binding {
                    name: "w0".into(),
                    slots: vec![Slot::Weight { body: 0, row: 0, entry: 0 }],
                },
                Binding {
                    name: "w1".into(),
                    slots: vec![Slot::Weight { body: 1, row: 0, entry: 0 }],
                },
                Binding {
                    name: "t0".into(),
                    slots: vec![Slot::Threshold { body: 0, neuron: 0 }],
                },
                Binding {
                    name: "t1".into(),
                    slots: vec![Slot::Threshold { body: 1, neuron: 0 }],
                },
            ],
        )
        .unwrap();
        let mode = Mode::relaxed(4.0).unwrap();
        let x = [c(0.6, 0.2)];
        let og = [c(1.0, -0.3)];
        let (_, t1) = forward(&shared, &x, mode).unwrap();
        let (_, t2) = forward(&split, &x, mode).unwrap();
        let a = backward(&shared, &t1, &og).unwrap();
        let b = backward(&split, &t2, &og).unwrap();
        assert!((a[0] - (b[0] + b[1])).abs() < 1e-12);
        assert!((a[1] - (b[2] + b[3])).abs() < 1e-12);
        let r = finite_diff_check(&shared, &x, &sq_loss(vec![c(0.0, 0.0)]), 4.0, 1e-5, 1e-8)
            .unwrap();
        assert!(r.max_rel_error < 1e-6, "{r:?}");
    }

    #[test]
    fn set_param_updates_every_slot() {
        let l = LayerSpec::new(
            1,
            vec![vec![(0, c(1.0, 0.0))]],
            vec![c(0.0, 0.0)],
            vec![ActivationKind::Identity],
        )
        .unwrap();
        let mut net = NetworkSpec::new(
            vec![l.clone(), l],
            vec![0, 1, 0],
            vec![Binding {
                name: "w".into(),
                slots: vec![
                    Slot::Weight { body: 0, row: 0, entry: 0 },
                    Slot::Weight { body: 1, row: 0, entry: 0 },
                ],
            }],
        )
        .unwrap();
        net.set_param(0, 3.0).unwrap();
        assert_eq!(net.layer(0).weight(0, 0), c(3.0, 0.0));
        assert_eq!(net.layer(1).weight(0, 0), c(3.0, 0.0));
        assert_eq!(net.layer(2).weight(0, 0), c(3.0, 0.0));
        assert_eq!(forward_output(&net, &[c(1.0, 0.0)], Mode::Hard).unwrap(), vec![c(27.0, 0.0)]);
    }

    #[test]
    fn rejects_broken_chains_and_bindings() {
        let a = LayerSpec::new(1, vec![vec![]; 2], vec![c(0.0, 0.0); 2], vec![ActivationKind::Identity; 2])
            .unwrap();
        assert!(NetworkSpec::new(vec![a.clone()], vec![0, 0], vec![]).is_err());
        assert!(NetworkSpec::new(vec![a.clone()], vec![], vec![]).is_err());
        assert!(NetworkSpec::new(
            vec![a],
            vec![0],
            vec![Binding {
                name: "t".into(),
                slots: vec![Slot::Threshold { body: 0, neuron: 0 }]
            }]
        )
        .is_err());
    }
}
