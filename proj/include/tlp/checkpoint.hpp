#ifndef TLP_CHECKPOINT_HPP_
#define TLP_CHECKPOINT_HPP_

#include <string>

#include "tlp/baseline.hpp"
#include "tlp/model.hpp"

namespace tlp {

// Flat binary parameter container, little-endian IEEE-754:
//   bytes 0-7   magic "TLPCKPT1"
//   byte  8     model kind: 0 adversarial model, 1 LSTM baseline
//   byte  9     LSTM candidate activation: 0 sigmoid, 1 tanh
//   u32         n_nodes, lstm hidden, critic/baseline hidden, block count
//   per block   u32 rows, u32 cols, rows*cols raw doubles
// Blocks appear in the canonical parameter order (GeneratorParams::blocks
// then DiscriminatorParams::blocks, or LstmBaselineParams::blocks). Round
// trips are bit-exact.

struct GanCheckpoint {
    GeneratorParams generator;
    DiscriminatorParams discriminator;
};

void save_gan_checkpoint(const std::string& path, const GeneratorParams& generator,
                         const DiscriminatorParams& discriminator);
GanCheckpoint load_gan_checkpoint(const std::string& path);

void save_baseline_checkpoint(const std::string& path, const LstmBaselineParams& params);
LstmBaselineParams load_baseline_checkpoint(const std::string& path);

}  // namespace tlp

#endif  // TLP_CHECKPOINT_HPP_
