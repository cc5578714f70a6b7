use laylens::synthgen::{generate_page, GenConfig, Preset};

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| ".".into());
    for preset in [Preset::Source8, Preset::SyntheticInvoice, Preset::SyntheticResume] {
        let cfg = GenConfig { seed: 1, ..GenConfig::preset(preset) };
        let (img, doc) = generate_page(&cfg, 0).unwrap();
        laylens::raster::write_pgm(&img, format!("{out}/{}.pgm", preset.name())).unwrap();
        println!("{} {} regions", preset.name(), doc.regions.len());
    }
}
