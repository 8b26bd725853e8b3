#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "tlp/checkpoint.hpp"
#include "tlp/errors.hpp"
#include "tlp/rng.hpp"

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("gan checkpoint round trip is bit-exact") {
    tlp::Rng rng(701);
    tlp::GeneratorParams generator = make_generator(rng, 6, 4, tlp::Activation::Tanh);
    tlp::DiscriminatorParams discriminator = make_discriminator(rng, 6, 8);

    const auto path = temp_file("tlp_gan.ckpt");
    tlp::save_gan_checkpoint(path.string(), generator, discriminator);
    tlp::GanCheckpoint loaded = tlp::load_gan_checkpoint(path.string());

    CHECK(loaded.generator.lstm.candidate_act == tlp::Activation::Tanh);
    auto expect_gen = generator.blocks();
    auto got_gen = loaded.generator.blocks();
    REQUIRE(expect_gen.size() == got_gen.size());
    for (std::size_t b = 0; b < expect_gen.size(); ++b) {
        CHECK(*expect_gen[b] == *got_gen[b]);
    }
    auto expect_disc = discriminator.blocks();
    auto got_disc = loaded.discriminator.blocks();
    for (std::size_t b = 0; b < expect_disc.size(); ++b) {
        CHECK(*expect_disc[b] == *got_disc[b]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("baseline checkpoint round trip is bit-exact") {
    tlp::Rng rng(703);
    tlp::LstmBaselineParams params = make_lstm_baseline(rng, 5, 7);

    const auto path = temp_file("tlp_baseline.ckpt");
    tlp::save_baseline_checkpoint(path.string(), params);
    tlp::LstmBaselineParams loaded = tlp::load_baseline_checkpoint(path.string());
    auto expect = params.blocks();
    auto got = loaded.blocks();
    REQUIRE(expect.size() == got.size());
    for (std::size_t b = 0; b < expect.size(); ++b) {
        CHECK(*expect[b] == *got[b]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("checkpoint loader rejects the wrong model kind") {
    tlp::Rng rng(707);
    tlp::LstmBaselineParams params = make_lstm_baseline(rng, 4, 3);
    const auto path = temp_file("tlp_kind.ckpt");
    tlp::save_baseline_checkpoint(path.string(), params);
    CHECK_THROWS_AS(tlp::load_gan_checkpoint(path.string()), tlp::ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("checkpoint loader rejects junk and truncation") {
    const auto path = temp_file("tlp_junk.ckpt");
    {
        std::ofstream out(path, std::ios::binary);
        out << "definitely not a checkpoint";
    }
    CHECK_THROWS_AS(tlp::load_gan_checkpoint(path.string()), tlp::ParseError);

    tlp::Rng rng(709);
    tlp::LstmBaselineParams params = make_lstm_baseline(rng, 4, 3);
    tlp::save_baseline_checkpoint(path.string(), params);
    const auto full_size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, full_size / 2);
    CHECK_THROWS_AS(tlp::load_baseline_checkpoint(path.string()), tlp::ParseError);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(tlp::load_gan_checkpoint("/nonexistent/nowhere.ckpt"), tlp::IoError);
}
