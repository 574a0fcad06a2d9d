use trajscore::pipeline::{score_all, PipelineConfig};
use trajscore::synth::{self, SynthConfig};
use trajscore::Vec3;

fn full_check(name: &str, cfg: &SynthConfig, count: usize) {
    let levels = synth::jitter_levels([0.0, 0.01, 0.05]);
    let pcfg = PipelineConfig::default();
    let mut ordered = 0;
    let (mut w01, mut w12) = (f64::INFINITY, f64::INFINITY);
    let mut wted = f64::INFINITY;
    let n = count as f64;
    for seed in 0..20u64 {
        let trajs = synth::synth_dataset(cfg, count, &levels, 1000 + seed).unwrap();
        let (records, f) = score_all(&trajs, &pcfg).unwrap();
        assert!(f.is_empty());
        let mut sal = [0.0f64; 3];
        let mut ted = [0.0f64; 3];
        for (t, r) in trajs.iter().zip(&records) {
            let i: usize = t.metadata["noise_level_index"].parse().unwrap();
            sal[i] += r.sal.unwrap() / n;
            ted[i] += r.ted.unwrap() / n;
        }
        if sal[0] > sal[1] && sal[1] > sal[2] && ted[0] < ted[1] && ted[1] < ted[2] { ordered += 1; }
        w01 = w01.min(sal[0] - sal[1]);
        w12 = w12.min(sal[1] - sal[2]);
        wted = wted.min(ted[1] - ted[0]).min(ted[2] - ted[1]);
    }
    println!("{name}: ordered {ordered}/20, worst sal clean-mid {w01:.2}, mid-noisy {w12:.2}, worst ted {wted:.4}");
}

fn main() {
    let mk = |dt: f64, wp: Vec3, dur: f64| SynthConfig {
        dt,
        waypoints: vec![Vec3::ZERO, wp],
        durations: vec![dur],
        contact_toggles: vec![1],
        orientation_keyframes: vec![],
        noise: vec![],
    };
    full_check("T=91 peak1.15 c16", &mk(0.05, Vec3::new(2.4, 0.8, 1.1), 4.5), 16);
    full_check("T=91 peak1.33 c16", &mk(0.05, Vec3::new(2.8, 0.9, 1.2), 4.5), 16);
    full_check("T=65 peak1.17 c16", &mk(0.05, Vec3::new(1.7, 0.6, 0.8), 3.2), 16);
    full_check("T=65 peak1.40 c16", &mk(0.05, Vec3::new(2.1, 0.7, 0.9), 3.2), 16);
}
