//! Schroeder reverb: four parallel feedback combs into two series all-passes.

/// Comb delays in samples at 48 kHz.
pub const COMB_DELAYS_48K: [usize; 4] = [1557, 1617, 1491, 1422];
/// All-pass delays in samples at 48 kHz.
pub const ALLPASS_DELAYS_48K: [usize; 2] = [225, 556];
pub const ALLPASS_GAIN: f64 = 0.5;

fn scaled(delay: usize, sample_rate: f64) -> usize {
    ((delay as f64 * sample_rate / 48_000.0).round() as usize).max(1)
}

/// Feedback that makes a comb of `delay_s` seconds decay 60 dB in `rt60` seconds.
pub fn comb_feedback(delay_s: f64, rt60: f64) -> f64 {
    10f64.powf(-3.0 * delay_s / rt60)
}

#[derive(Debug, Clone)]
struct DelayLine {
    buf: Vec<f64>,
    pos: usize,
}

impl DelayLine {
    fn new(len: usize) -> Self {
        Self {
            buf: vec![0.0; len],
            pos: 0,
        }
    }

    /// Sample written `len` calls ago.
    #[inline]
    fn read(&self) -> f64 {
        self.buf[self.pos]
    }

    #[inline]
    fn write_advance(&mut self, v: f64) {
        self.buf[self.pos] = v;
        self.pos += 1;
        if self.pos == self.buf.len() {
            self.pos = 0;
        }
    }

    fn clear(&mut self) {
        self.buf.fill(0.0);
    }
}

#[derive(Debug, Clone)]
struct Comb {
    line: DelayLine,
    feedback: f64,
}

impl Comb {
    // y[n] = x[n - D] + g y[n - D]
    #[inline]
    fn process(&mut self, input: f64) -> f64 {
        let out = self.line.read();
        self.line.write_advance(input + self.feedback * out);
        out
    }
}

#[derive(Debug, Clone)]
struct AllPass {
    line: DelayLine,
    gain: f64,
}

impl AllPass {
    // w[n] = x[n] + g w[n - D];  y[n] = -g w[n] + w[n - D]
    #[inline]
    fn process(&mut self, input: f64) -> f64 {
        let delayed = self.line.read();
        let w = input + self.gain * delayed;
        self.line.write_advance(w);
        delayed - self.gain * w
    }
}

#[derive(Debug, Clone)]
pub struct Reverb {
    sample_rate: f64,
    combs: [Comb; 4],
    allpasses: [AllPass; 2],
    max_feedback: f64,
    rt60: f64,
}

impl Reverb {
    pub fn new(sample_rate: f64, rt60: f64, max_feedback: f64) -> Self {
        let comb = |d| Comb {
            line: DelayLine::new(scaled(d, sample_rate)),
            feedback: 0.0,
        };
        let allpass = |d| AllPass {
            line: DelayLine::new(scaled(d, sample_rate)),
            gain: ALLPASS_GAIN,
        };
        let mut reverb = Self {
            sample_rate,
            combs: COMB_DELAYS_48K.map(comb),
            allpasses: ALLPASS_DELAYS_48K.map(allpass),
            max_feedback,
            rt60: 0.0,
        };
        reverb.set_decay(rt60);
        reverb
    }

    pub fn comb_delays(&self) -> [usize; 4] {
        [0, 1, 2, 3].map(|i| self.combs[i].line.buf.len())
    }

    pub fn feedbacks(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| self.combs[i].feedback)
    }

    pub fn rt60(&self) -> f64 {
        self.rt60
    }

    /// Sets every comb's feedback for the requested decay, capped below 1.
    pub fn set_decay(&mut self, rt60: f64) {
        if rt60 == self.rt60 {
            return;
        }
        self.rt60 = rt60;
        for comb in &mut self.combs {
            let delay_s = comb.line.buf.len() as f64 / self.sample_rate;
            comb.feedback = comb_feedback(delay_s, rt60).min(self.max_feedback);
        }
    }

    /// Wet output only.
    #[inline]
    pub fn process(&mut self, input: f64) -> f64 {
        let mut acc = 0.0;
        for comb in &mut self.combs {
            acc += comb.process(input);
        }
        let mut y = acc * 0.25;
        for ap in &mut self.allpasses {
            y = ap.process(y);
        }
        y
    }

    pub fn clear(&mut self) {
        for c in &mut self.combs {
            c.line.clear();
        }
        for a in &mut self.allpasses {
            a.line.clear();
        }
    }
}
