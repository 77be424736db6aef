#include "fleam/data/synth.hpp"

#include <cmath>
#include <string>

#include "fleam/core/rng.hpp"

namespace fleam::data {

namespace {

struct Draw {
  std::vector<std::string> values;
  std::vector<double> weights;
  const std::string& operator()(Rng& rng) const { return values[rng.categorical(weights)]; }
};

// class-conditional pools; attack sources partly hide inside the benign
// address block so no single column separates the classes
const Draw kBenignProto{{"tcp", "udp", "arp", "ospf"}, {0.62, 0.30, 0.05, 0.03}};
const Draw kAttackProto{{"tcp", "udp", "unas", "ospf"}, {0.40, 0.33, 0.15, 0.12}};
const Draw kBenignState{{"FIN", "CON", "REQ", "RST"}, {0.62, 0.23, 0.10, 0.05}};
const Draw kAttackState{{"INT", "FIN", "CON", "RST"}, {0.45, 0.20, 0.15, 0.20}};
const Draw kBenignService{{"http", "dns", "smtp", "ftp", "ssh", "-"},
                          {0.28, 0.26, 0.12, 0.08, 0.06, 0.20}};
const Draw kAttackService{{"-", "http", "dns", "irc", "ssh"}, {0.50, 0.18, 0.20, 0.07, 0.05}};
const Draw kBenignPort{{"80", "53", "25", "443", "21", "22"}, {0.3, 0.25, 0.1, 0.2, 0.08, 0.07}};
const Draw kAttackCat{{"Generic", "Exploits", "Fuzzers", "DoS", "Reconnaissance"},
                      {0.35, 0.25, 0.15, 0.15, 0.10}};

std::string benign_src(Rng& rng) {
  return "59.166.0." + std::to_string(1 + rng.next_below(120));
}

std::string attack_src(Rng& rng) {
  if (rng.next_double() < 0.6) {
    return "175.45.176." + std::to_string(1 + rng.next_below(60));
  }
  return benign_src(rng);  // bots rooted inside the benign block
}

std::string server_ip(Rng& rng) {
  return "149.171.126." + std::to_string(1 + rng.next_below(40));
}

}  // namespace

std::vector<Record> synth_records(const SynthOptions& opt) {
  Rng rng(opt.seed);
  std::vector<Record> records;
  records.reserve(opt.rows);
  double clock = 1421927414.0;

  for (std::size_t i = 0; i < opt.rows; ++i) {
    const int label = rng.next_double() < opt.attack_fraction ? 1 : 0;
    // a confused row keeps its label but draws features as the other class
    const bool flip = rng.next_double() < opt.confusion;
    const bool attack_like = (label == 1) != flip;

    Record r;
    r.label = label;
    r.attack_cat = label ? kAttackCat(rng) : "";

    const std::string srcip = attack_like ? attack_src(rng) : benign_src(rng);
    const std::string dstip = server_ip(rng);
    const std::string sport = std::to_string(1024 + rng.next_below(64000));
    const std::string dsport = attack_like && rng.next_double() < 0.45
                                   ? std::to_string(1 + rng.next_below(65535))
                                   : kBenignPort(rng);

    const double dur = attack_like ? rng.lognormal(-3.0, 1.2) : rng.lognormal(-1.2, 1.0);
    const double spkts = 2 + rng.poisson(attack_like ? 4.0 : 12.0);
    const double dpkts = attack_like ? rng.poisson(2.0) : 2 + rng.poisson(10.0);
    const double smeansz = attack_like ? rng.uniform(40, 300) : rng.uniform(200, 900);
    const double dmeansz = attack_like ? rng.uniform(0, 200) : rng.uniform(300, 1100);
    const double sbytes = spkts * smeansz * rng.uniform(0.9, 1.1);
    const double dbytes = dpkts * dmeansz * rng.uniform(0.9, 1.1);
    const double sttl = attack_like ? (rng.next_double() < 0.70 ? 254 : (rng.next_double() < 0.6 ? 62 : 31))
                                    : (rng.next_double() < 0.35 ? 31 : (rng.next_double() < 0.65 ? 62 : 254));
    const double dttl = attack_like ? (rng.next_double() < 0.5 ? 252 : 29) : (rng.next_double() < 0.6 ? 29 : 252);
    const double sloss = rng.poisson(attack_like ? 2.0 : 0.5);
    const double dloss = rng.poisson(attack_like ? 1.0 : 0.5);
    const double sload = dur > 1e-6 ? sbytes * 8.0 / dur : sbytes * 8.0 * 1e6;
    const double dload = dur > 1e-6 ? dbytes * 8.0 / dur : 0.0;
    const bool tcp = !attack_like || rng.next_double() < 0.5;
    const double swin = tcp ? 255 : 0;
    const double dwin = tcp ? 255 : 0;
    const double stcpb = tcp ? rng.next_below(4000000000ULL) : 0;
    const double dtcpb = tcp ? rng.next_below(4000000000ULL) : 0;
    const double trans_depth = rng.next_double() < 0.2 ? 1 : 0;
    const double res_bdy_len = trans_depth > 0 ? rng.uniform(0, 6000) : 0;
    const double sjit = rng.lognormal(attack_like ? 1.5 : 3.0, 1.0);
    const double djit = rng.lognormal(attack_like ? 1.0 : 2.5, 1.0);
    clock += rng.uniform(0.0005, 0.01);
    const double stime = clock;
    const double ltime = clock + dur;
    const double sintpkt = spkts > 0 ? dur * 1000.0 / spkts : 0;
    const double dintpkt = dpkts > 0 ? dur * 1000.0 / dpkts : 0;
    const double tcprtt = tcp ? rng.uniform(0.0, 0.2) : 0;
    const double synack = tcprtt * rng.uniform(0.3, 0.7);
    const double ackdat = tcprtt - synack;
    const double is_sm = rng.next_double() < 0.002 ? 1 : 0;
    const double ct_state_ttl = attack_like ? 1 + rng.next_below(5) : rng.next_below(2);
    const double ct_http = rng.poisson(0.6);
    const double ftp = rng.next_double() < 0.06 ? 1 : 0;
    const double ct_ftp = ftp > 0 ? 1 + rng.poisson(1.0) : 0;
    const double ct_srv_src = attack_like ? 4 + rng.poisson(9.0) : 1 + rng.poisson(2.0);
    const double ct_srv_dst = attack_like ? 3 + rng.poisson(8.0) : 1 + rng.poisson(2.0);
    const double ct_dst_ltm = attack_like ? 2 + rng.poisson(6.0) : 1 + rng.poisson(1.5);
    const double ct_src_ltm = attack_like ? 2 + rng.poisson(6.0) : 1 + rng.poisson(1.5);
    const double ct_src_dport = attack_like ? 1 + rng.poisson(4.0) : rng.poisson(1.0);
    const double ct_dst_sport = attack_like ? 1 + rng.poisson(3.0) : rng.poisson(1.0);
    const double ct_dst_src = attack_like ? 2 + rng.poisson(5.0) : 1 + rng.poisson(1.5);

    r.categorical = {srcip, sport, dstip, dsport,
                     attack_like ? kAttackProto(rng) : kBenignProto(rng),
                     attack_like ? kAttackState(rng) : kBenignState(rng),
                     attack_like ? kAttackService(rng) : kBenignService(rng)};
    r.numeric = {dur,        sbytes,   dbytes,  sttl,        dttl,       sloss,
                 dloss,      sload,    dload,   spkts,       dpkts,      swin,
                 dwin,       stcpb,    dtcpb,   smeansz,     dmeansz,    trans_depth,
                 res_bdy_len, sjit,    djit,    stime,       ltime,      sintpkt,
                 dintpkt,    tcprtt,   synack,  ackdat,      is_sm,      ct_state_ttl,
                 ct_http,    ftp,      ct_ftp,  ct_srv_src,  ct_srv_dst, ct_dst_ltm,
                 ct_src_ltm, ct_src_dport, ct_dst_sport, ct_dst_src};
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace fleam::data
