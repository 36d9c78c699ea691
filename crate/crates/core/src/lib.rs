//! Camera parameter auto-tuning toolkit.
//!
//! * [`calibration`]: camera parameter to virtual knob mapping
//! * [`imaging`]: RGB buffers and the four virtual-knob transforms
//! * [`metrics`]: SSIM, feature measurement and frame tiling
//! * [`deteval`]: mAP/IoU scoring and the best-config sweep
//! * [`estimator`]: analytics-quality estimators and the frame gate
//! * [`vcam`]: the time-of-day virtual camera
//! * [`scene`]: synthetic day-cycle scenes with ground truth
//! * [`rl`]: the SARSA knob tuner
//! * [`harness`]: baseline vs tuned evaluation over a simulated day

pub mod calibration;
pub mod deteval;
pub mod estimator;
pub mod harness;
pub mod imaging;
pub mod metrics;
pub mod rl;
pub mod scene;
pub mod vcam;
