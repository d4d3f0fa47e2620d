use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use voxelworld::io::{self, Axis, ProjectionMode};
use voxelworld::material::Characteristic;
use voxelworld::synthesis::{run_scenario, Source, VolumeCell, VolumetricRepresentation};
use voxelworld::voxelizer::{Primitive, Voxelizer};
use voxelworld::{Error, Result};

#[derive(Parser)]
#[command(
    name = "voxelworld",
    version,
    about = "Voxel-world renderer for volumetric displays"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    First,
    Max,
}

#[derive(Subcommand)]
enum Command {
    /// Render a scene to a volume file.
    Render {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 1 is serial, 0 uses all cores.
        #[arg(long, env = "VOXELWORLD_THREADS", default_value_t = 0)]
        threads: usize,
        /// Also write a projection along this axis.
        #[arg(long, requires = "ppm")]
        project: Option<AxisArg>,
        #[arg(long, requires = "project")]
        ppm: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModeArg::First)]
        mode: ModeArg,
    },
    /// Render one volume per frame update.
    Animate {
        #[arg(long)]
        scene: PathBuf,
        /// JSON array of frame updates.
        #[arg(long)]
        frames: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, env = "VOXELWORLD_THREADS", default_value_t = 0)]
        threads: usize,
    },
    /// Voxelize a single primitive into a volume file in object coordinates.
    Voxelize {
        /// Primitive as inline JSON, e.g. '{"type":"sphere","center":[0,0,0],"radius":4}'.
        #[arg(long)]
        primitive: String,
        #[arg(long)]
        cell_size: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a volume's header and cell census.
    Info {
        #[arg(long)]
        volume: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Render {
            scene,
            out,
            threads,
            project,
            ppm,
            mode,
        } => {
            let scene = io::load_scene(&scene)?;
            let p = scene.synthesize(threads)?;
            let projection = match (project, ppm) {
                (Some(axis), Some(path)) => {
                    let axis = match axis {
                        AxisArg::X => Axis::X,
                        AxisArg::Y => Axis::Y,
                        AxisArg::Z => Axis::Z,
                    };
                    let mode = match mode {
                        ModeArg::First => ProjectionMode::FirstPopulated,
                        ModeArg::Max => ProjectionMode::MaxChannel,
                    };
                    let mut bytes = Vec::new();
                    io::write_ppm(&io::project(&p, axis, mode), &mut bytes)?;
                    Some((path, bytes))
                }
                _ => None,
            };
            io::write_volume(&p, &out)?;
            if let Some((path, bytes)) = projection {
                io::write_atomic(&path, &bytes)?;
            }
            Ok(())
        }
        Command::Animate {
            scene,
            frames,
            out_dir,
            threads,
        } => {
            let mut scene = io::load_scene(&scene)?;
            let updates = io::load_frames(&frames)?;
            let volumes = run_scenario(&mut scene, &updates, threads)?;
            std::fs::create_dir_all(&out_dir)?;
            for (k, p) in volumes.iter().enumerate() {
                io::write_volume(p, out_dir.join(format!("frame_{k:04}.vvol")))?;
            }
            Ok(())
        }
        Command::Voxelize {
            primitive,
            cell_size,
            out,
        } => {
            let de = &mut serde_json::Deserializer::from_str(&primitive);
            let prim: Primitive =
                serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
                    context: format!("--primitive at `{}`", e.path()),
                    message: e.into_inner().to_string(),
                })?;
            let model =
                Voxelizer::default().voxelize(&prim, cell_size, Characteristic::default())?;
            let lattice = &model.lattice;
            let mut p =
                VolumetricRepresentation::empty(lattice.dims, lattice.cell_size, lattice.origin);
            for c in model.occupied_coords() {
                let m = model.material_at(c);
                let i = p.index(c);
                p.cells[i] = VolumeCell {
                    source: Source::Object(voxelworld::ObjectId(0)),
                    color: [m.color.r as f32, m.color.g as f32, m.color.b as f32],
                    transparency: m.transparency as f32,
                };
            }
            io::write_volume(&p, &out)
        }
        Command::Info { volume } => {
            let p = io::read_volume(&volume)?;
            let [nx, ny, nz] = p.dims;
            let o = p.origin;
            println!(
                "dims={nx}x{ny}x{nz} cell_size={} origin={},{},{}",
                p.cell_size, o.x, o.y, o.z
            );
            println!(
                "object_cells={} scene_cells={}",
                p.object_count(),
                p.scene_count()
            );
            Ok(())
        }
    }
}
