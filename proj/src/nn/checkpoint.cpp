#include "topicforge/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"

namespace topicforge::nn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char magic[4] = {'T', 'F', 'C', '1'};
constexpr std::uint32_t version = 1;

class Writer {
public:
    template <typename T>
    void pod(T v) {
        char buf[sizeof(T)];
        std::memcpy(buf, &v, sizeof(T));
        out.append(buf, sizeof(T));
    }
    void str(std::string_view s) {
        pod(static_cast<std::uint32_t>(s.size()));
        out.append(s);
    }
    std::string out;
};

class Reader {
public:
    explicit Reader(std::string_view b) : bytes(b) {}
    template <typename T>
    T pod() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, bytes.data() + pos, sizeof(T));
        pos += sizeof(T);
        return v;
    }
    std::string str() {
        const auto n = pod<std::uint32_t>();
        need(n);
        std::string s(bytes.substr(pos, n));
        pos += n;
        return s;
    }
    void need(std::size_t n) const {
        if (pos + n > bytes.size())
            throw InputError("checkpoint truncated: need " + std::to_string(pos + n) + " bytes, have " +
                             std::to_string(bytes.size()));
    }
    std::string_view bytes;
    std::size_t pos = 0;
};

void write_group(Writer& w, const ParamSet& p) {
    w.pod(static_cast<std::uint32_t>(p.tensors().size()));
    for (const auto& t : p.tensors()) {
        w.str(t.name);
        w.pod(static_cast<std::uint32_t>(t.rows));
        w.pod(static_cast<std::uint32_t>(t.cols));
    }
    for (double v : p.values()) w.pod(v);
}

void read_group(Reader& r, ParamSet& p) {
    const auto n = r.pod<std::uint32_t>();
    if (n != p.tensors().size())
        throw InputError("checkpoint tensor count " + std::to_string(n) + " does not match architecture (" +
                         std::to_string(p.tensors().size()) + ")");
    for (const auto& t : p.tensors()) {
        const std::string name = r.str();
        const auto rows = r.pod<std::uint32_t>();
        const auto cols = r.pod<std::uint32_t>();
        if (name != t.name || rows != t.rows || cols != t.cols)
            throw InputError("checkpoint tensor '" + name + "' does not match expected '" + t.name + "'");
    }
    for (double& v : p.values()) v = r.pod<double>();
}

}  // namespace

std::string encode_checkpoint(const Model& model, const ScalerPair& scalers) {
    Writer w;
    w.out.append(magic, 4);
    w.pod(version);
    w.str(arch_name(model.arch));
    const ModelShape& s = model.shape;
    for (std::size_t v : {model.lookback, model.features, s.lstm_hidden, s.conv_filters, s.kernel, s.pool,
                          s.dense_units, s.gan_hidden, s.disc_units, s.noise_dim})
        w.pod(static_cast<std::uint32_t>(v));
    const bool gan = model.arch == Arch::gan;
    w.pod(static_cast<std::uint32_t>(gan ? 2 : 1));
    write_group(w, model.net.params());
    if (gan) write_group(w, model.disc.params());
    w.pod(scalers.target.min);
    w.pod(scalers.target.max);
    w.pod(static_cast<std::uint32_t>(scalers.names.size()));
    for (std::size_t i = 0; i < scalers.names.size(); ++i) {
        w.str(scalers.names[i]);
        w.pod(scalers.features[i].min);
        w.pod(scalers.features[i].max);
    }
    return std::move(w.out);
}

Checkpoint decode_checkpoint(std::string_view bytes) {
    Reader r(bytes);
    r.need(4);
    if (bytes.substr(0, 4) != std::string_view(magic, 4)) throw InputError("not a checkpoint: magic mismatch");
    r.pos = 4;
    if (const auto v = r.pod<std::uint32_t>(); v != version)
        throw InputError("unsupported checkpoint version " + std::to_string(v));
    const Arch arch = parse_arch(r.str());
    std::size_t f[10];
    for (auto& v : f) v = r.pod<std::uint32_t>();
    ModelShape shape{f[2], f[3], f[4], f[5], f[6], f[7], f[8], f[9]};
    Checkpoint c;
    c.model = Model::create(arch, shape, f[0], f[1]);
    const auto groups = r.pod<std::uint32_t>();
    if (groups != (arch == Arch::gan ? 2u : 1u)) throw InputError("checkpoint group count does not match architecture");
    read_group(r, c.model.net.params());
    if (arch == Arch::gan) read_group(r, c.model.disc.params());
    c.scalers.target.min = r.pod<double>();
    c.scalers.target.max = r.pod<double>();
    const auto n = r.pod<std::uint32_t>();
    for (std::uint32_t i = 0; i < n; ++i) {
        c.scalers.names.push_back(r.str());
        MinMax m;
        m.min = r.pod<double>();
        m.max = r.pod<double>();
        c.scalers.features.push_back(m);
    }
    if (r.pos != bytes.size()) throw InputError("checkpoint has " + std::to_string(bytes.size() - r.pos) + " trailing bytes");
    return c;
}

void save_checkpoint(const std::filesystem::path& path, const Model& model, const ScalerPair& scalers) {
    csv::write_file(path, encode_checkpoint(model, scalers));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(csv::read_file(path)); }

}  // namespace topicforge::nn
