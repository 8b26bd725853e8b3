#include "tlp/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "tlp/errors.hpp"

namespace tlp {

namespace {

constexpr char kMagic[8] = {'T', 'L', 'P', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint8_t kKindGan = 0;
constexpr std::uint8_t kKindBaseline = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char bytes[4] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff),
                              static_cast<unsigned char>((v >> 16) & 0xff),
                              static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
        throw ParseError(path + ": truncated checkpoint");
    }
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) |
           (static_cast<std::uint32_t>(bytes[3]) << 24);
}

struct Header {
    std::uint8_t kind;
    Activation candidate_act;
    std::uint32_t n_nodes;
    std::uint32_t lstm_hidden;
    std::uint32_t aux_hidden;
    std::uint32_t n_blocks;
};

void write_header(std::ostream& out, const Header& h) {
    out.write(kMagic, sizeof(kMagic));
    const char kind = static_cast<char>(h.kind);
    const char act = h.candidate_act == Activation::Tanh ? 1 : 0;
    out.write(&kind, 1);
    out.write(&act, 1);
    write_u32(out, h.n_nodes);
    write_u32(out, h.lstm_hidden);
    write_u32(out, h.aux_hidden);
    write_u32(out, h.n_blocks);
}

Header read_header(std::istream& in, const std::string& path, std::uint8_t expected_kind) {
    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ParseError(path + ": not a checkpoint file");
    }
    char kind = 0;
    char act = 0;
    if (!in.read(&kind, 1) || !in.read(&act, 1)) {
        throw ParseError(path + ": truncated checkpoint");
    }
    if (static_cast<std::uint8_t>(kind) != expected_kind) {
        throw ParseError(path + ": checkpoint holds a different model kind");
    }
    Header h;
    h.kind = static_cast<std::uint8_t>(kind);
    h.candidate_act = act == 1 ? Activation::Tanh : Activation::Sigmoid;
    h.n_nodes = read_u32(in, path);
    h.lstm_hidden = read_u32(in, path);
    h.aux_hidden = read_u32(in, path);
    h.n_blocks = read_u32(in, path);
    return h;
}

void write_block(std::ostream& out, const Matrix& m) {
    write_u32(out, static_cast<std::uint32_t>(m.rows()));
    write_u32(out, static_cast<std::uint32_t>(m.cols()));
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
}

void read_block(std::istream& in, const std::string& path, Matrix& m) {
    const std::uint32_t rows = read_u32(in, path);
    const std::uint32_t cols = read_u32(in, path);
    if (rows != m.rows() || cols != m.cols()) {
        throw ParseError(path + ": block shape " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " does not match expected " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (!in.read(reinterpret_cast<char*>(m.data()),
                 static_cast<std::streamsize>(m.size() * sizeof(double)))) {
        throw ParseError(path + ": truncated checkpoint");
    }
}

LstmParams lstm_shell(std::size_t input, std::size_t hidden, Activation candidate_act) {
    auto gate = [&] {
        return LstmGateParams{Matrix(input, hidden), Matrix(hidden, hidden), Matrix(1, hidden)};
    };
    return LstmParams{gate(), gate(), gate(), gate(), candidate_act};
}

}  // namespace

void save_gan_checkpoint(const std::string& path, const GeneratorParams& generator,
                         const DiscriminatorParams& discriminator) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    const auto gen_blocks = generator.blocks();
    const auto disc_blocks = discriminator.blocks();
    Header h;
    h.kind = kKindGan;
    h.candidate_act = generator.lstm.candidate_act;
    h.n_nodes = static_cast<std::uint32_t>(generator.n_nodes());
    h.lstm_hidden = static_cast<std::uint32_t>(generator.lstm.hidden_size());
    h.aux_hidden = static_cast<std::uint32_t>(discriminator.hidden.weight.cols());
    h.n_blocks = static_cast<std::uint32_t>(gen_blocks.size() + disc_blocks.size());
    write_header(out, h);
    for (const Matrix* block : gen_blocks) {
        write_block(out, *block);
    }
    for (const Matrix* block : disc_blocks) {
        write_block(out, *block);
    }
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

GanCheckpoint load_gan_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    const Header h = read_header(in, path, kKindGan);
    const std::size_t n = h.n_nodes;

    GanCheckpoint ckpt;
    ckpt.generator.gcn.weight = Matrix(n, n);
    ckpt.generator.lstm = lstm_shell(n * n, h.lstm_hidden, h.candidate_act);
    ckpt.generator.output = DenseParams{Matrix(h.lstm_hidden, n * n), Matrix(1, n * n)};
    ckpt.discriminator.hidden = DenseParams{Matrix(n * n, h.aux_hidden), Matrix(1, h.aux_hidden)};
    ckpt.discriminator.output = DenseParams{Matrix(h.aux_hidden, 1), Matrix(1, 1)};

    auto gen_blocks = ckpt.generator.blocks();
    auto disc_blocks = ckpt.discriminator.blocks();
    if (h.n_blocks != gen_blocks.size() + disc_blocks.size()) {
        throw ParseError(path + ": unexpected block count " + std::to_string(h.n_blocks));
    }
    for (Matrix* block : gen_blocks) {
        read_block(in, path, *block);
    }
    for (Matrix* block : disc_blocks) {
        read_block(in, path, *block);
    }
    return ckpt;
}

void save_baseline_checkpoint(const std::string& path, const LstmBaselineParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    const auto blocks = params.blocks();
    Header h;
    h.kind = kKindBaseline;
    h.candidate_act = params.lstm.candidate_act;
    h.n_nodes = static_cast<std::uint32_t>(params.n_nodes());
    h.lstm_hidden = static_cast<std::uint32_t>(params.lstm.hidden_size());
    h.aux_hidden = static_cast<std::uint32_t>(params.lstm.hidden_size());
    h.n_blocks = static_cast<std::uint32_t>(blocks.size());
    write_header(out, h);
    for (const Matrix* block : blocks) {
        write_block(out, *block);
    }
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

LstmBaselineParams load_baseline_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    const Header h = read_header(in, path, kKindBaseline);
    const std::size_t n = h.n_nodes;

    LstmBaselineParams params;
    params.lstm = lstm_shell(n * n, h.lstm_hidden, h.candidate_act);
    params.output = DenseParams{Matrix(h.lstm_hidden, n * n), Matrix(1, n * n)};

    auto blocks = params.blocks();
    if (h.n_blocks != blocks.size()) {
        throw ParseError(path + ": unexpected block count " + std::to_string(h.n_blocks));
    }
    for (Matrix* block : blocks) {
        read_block(in, path, *block);
    }
    return params;
}

}  // namespace tlp
