#include "narep/model_file.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "expr_parser.hpp"
#include "lexer.hpp"

namespace narep {

const RewardVar* ModelFile::find_reward(std::string_view name) const {
  for (const RewardVar& r : rewards) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

namespace {

using detail::Tok;
using detail::Token;
using detail::TokenStream;

class ModelParser {
 public:
  explicit ModelParser(std::string_view text) : ts_(detail::tokenize(text)) {}

  ModelFile run() {
    ModelFile out;
    bool have_root = false;
    if (ts_.at(Tok::End)) ts_.error_expected("'atomic', 'compose' or 'reward'");
    while (!ts_.at(Tok::End)) {
      if (ts_.at_keyword("atomic")) {
        auto m = atomic_model();
        if (atomics_.count(m->name)) fail(Errc::ValidationError, "atomic '" + m->name + "' defined twice", m->pos, "DUPLICATE_ATOMIC");
        atomics_[m->name] = m;
        out.atomics.push_back(std::move(m));
      } else if (ts_.at_keyword("compose")) {
        const SourcePos pos = ts_.next().pos;
        if (have_root) fail(Errc::ValidationError, "more than one compose section", pos, "MULTIPLE_COMPOSE");
        out.root = node();
        ts_.accept(Tok::Semicolon);
        have_root = true;
      } else if (ts_.at_keyword("reward")) {
        out.rewards.push_back(reward());
      } else {
        ts_.error_expected("'atomic', 'compose' or 'reward'");
      }
    }
    if (!have_root) fail(Errc::ValidationError, "missing compose section", ts_.peek().pos, "MISSING_COMPOSE");
    for (std::size_t i = 0; i < out.rewards.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (out.rewards[i].name == out.rewards[j].name) {
          fail(Errc::ValidationError, "reward '" + out.rewards[i].name + "' defined twice", {}, "DUPLICATE_REWARD");
        }
      }
    }
    return out;
  }

 private:
  Expr expr() { return detail::parse_expression(ts_, bound_); }

  // ------------------------------------------------------------------ atomic

  std::shared_ptr<const AtomicModel> atomic_model() {
    auto m = std::make_shared<AtomicModel>();
    m->pos = ts_.peek().pos;
    ts_.expect_keyword("atomic");
    m->name = ts_.expect_ident("model name");
    ts_.expect(Tok::LBrace);
    while (!ts_.accept(Tok::RBrace)) {
      if (ts_.at_keyword("place")) {
        m->places.push_back(place());
      } else if (ts_.at_keyword("activity")) {
        m->activities.push_back(activity());
      } else {
        ts_.error_expected("'place', 'activity' or '}'");
      }
    }
    require_valid(*m);
    return m;
  }

  PlaceDecl place() {
    PlaceDecl p;
    ts_.expect_keyword("place");
    p.pos = ts_.peek().pos;
    p.name = ts_.expect_ident("place name");
    if (detail::is_reserved_word(p.name)) fail(Errc::SyntaxError, "'" + p.name + "' is reserved", p.pos);
    if (ts_.accept(Tok::LBracket)) {
      p.length = ts_.expect_int("array length");
      ts_.expect(Tok::RBracket);
    }
    if (ts_.accept_keyword("init")) {
      if (ts_.accept(Tok::LBrace)) {
        do {
          p.initial.push_back(expr());
        } while (ts_.accept(Tok::Comma));
        ts_.expect(Tok::RBrace);
      } else {
        p.initial.push_back(expr());
      }
    }
    ts_.expect(Tok::Semicolon);
    return p;
  }

  ActivityDecl activity() {
    ActivityDecl a;
    ts_.expect_keyword("activity");
    a.pos = ts_.peek().pos;
    a.name = ts_.expect_ident("activity name");
    if (ts_.accept_keyword("exp")) {
      a.timing = Timing::Exponential;
      a.rate = parenthesized();
    } else if (ts_.accept_keyword("det")) {
      a.timing = Timing::Deterministic;
      a.rate = parenthesized();
    } else if (ts_.accept_keyword("instant")) {
      a.timing = Timing::Instantaneous;
    } else {
      ts_.error_expected("'exp', 'det' or 'instant'");
    }
    for (;;) {
      if (ts_.at_keyword("priority")) {
        const SourcePos pos = ts_.next().pos;
        if (a.timed()) fail(Errc::SyntaxError, "priority applies to instantaneous activities", pos);
        a.priority = static_cast<int>(ts_.expect_int("priority"));
      } else if (ts_.at_keyword("weight")) {
        const SourcePos pos = ts_.next().pos;
        if (a.timed()) fail(Errc::SyntaxError, "weight applies to instantaneous activities", pos);
        a.weight = parenthesized();
      } else if (ts_.accept_keyword("when")) {
        a.enabling = expr();
      } else {
        break;
      }
    }
    if (ts_.at(Tok::LBrace)) {
      Case c;
      c.updates = updates();
      a.cases.push_back(std::move(c));
    } else if (ts_.at_keyword("case")) {
      while (ts_.accept_keyword("case")) {
        Case c;
        c.weight = parenthesized();
        c.updates = updates();
        a.cases.push_back(std::move(c));
      }
    } else {
      ts_.error_expected("'{', 'case', 'when', 'priority' or 'weight'");
    }
    return a;
  }

  Expr parenthesized() {
    ts_.expect(Tok::LParen);
    Expr e = expr();
    ts_.expect(Tok::RParen);
    return e;
  }

  std::vector<UpdateStmt> updates() {
    std::vector<UpdateStmt> out;
    ts_.expect(Tok::LBrace);
    while (!ts_.accept(Tok::RBrace)) {
      Expr target = detail::parse_place_target(ts_, bound_);
      const SourcePos pos = ts_.peek().pos;
      if (ts_.accept(Tok::Assign)) {
        out.push_back({target, expr()});
      } else if (ts_.accept(Tok::PlusAssign)) {
        out.push_back({target, Expr(ast::Binary{BinaryOp::Add, target, expr()}, pos)});
      } else if (ts_.accept(Tok::MinusAssign)) {
        out.push_back({target, Expr(ast::Binary{BinaryOp::Sub, target, expr()}, pos)});
      } else {
        ts_.error_expected("'=', '+=' or '-='");
      }
      ts_.expect(Tok::Semicolon);
    }
    return out;
  }

  // ------------------------------------------------------------------ compose

  template <class F>
  auto checked(SourcePos pos, F&& build) {
    try {
      return build();
    } catch (const Error& err) {
      if (err.code() == Errc::ValidationError || err.code() == Errc::SyntaxError) throw;
      fail(Errc::ValidationError, err.detail(), err.pos() == SourcePos{} ? pos : err.pos(),
           err.rule().empty() ? std::string(to_string(err.code())) : err.rule());
    }
  }

  CompositionNode node() {
    const Token& t = ts_.peek();
    const SourcePos pos = t.pos;
    if (t.kind != Tok::Ident) ts_.error_expected("model name, 'join', 'rep' or 'narep'");
    if (t.text == "join") return join_node();
    if (t.text == "rep") return rep_node();
    if (t.text == "narep") return narep_node();
    const std::string name = ts_.expect_ident();
    std::string label;
    if (ts_.accept_keyword("as")) label = ts_.expect_ident("label");
    const auto it = atomics_.find(name);
    if (it == atomics_.end()) {
      fail(Errc::ValidationError, "unknown atomic model '" + name + "'", pos, "UNKNOWN_MODEL");
    }
    return checked(pos, [&] { return narep::atomic(it->second, label); });
  }

  std::string path() {
    std::string out = ts_.expect_ident("path");
    for (;;) {
      if (ts_.accept(Tok::LBracket)) {
        out += "[" + std::to_string(ts_.expect_int("replica index")) + "]";
        ts_.expect(Tok::RBracket);
      }
      if (!ts_.accept(Tok::Dot)) return out;
      out += "." + ts_.expect_ident("path segment");
    }
  }

  std::vector<std::int64_t> int_set() {
    std::vector<std::int64_t> out;
    ts_.expect(Tok::LBrace);
    if (ts_.accept(Tok::RBrace)) return out;
    do {
      out.push_back(ts_.expect_int("replica index"));
    } while (ts_.accept(Tok::Comma));
    ts_.expect(Tok::RBrace);
    return out;
  }

  CompositionNode join_node() {
    const SourcePos pos = ts_.next().pos;
    const std::string label = ts_.expect_ident("join label");
    ts_.expect(Tok::LBrace);
    std::vector<CompositionNode> members;
    std::vector<JoinSpec> joins;
    while (!ts_.accept(Tok::RBrace)) {
      if (ts_.accept_keyword("share")) {
        JoinSpec spec;
        do {
          spec.members.push_back(path());
        } while (ts_.accept(Tok::Comma));
        joins.push_back(std::move(spec));
      } else {
        members.push_back(node());
      }
      ts_.expect(Tok::Semicolon);
    }
    return checked(pos, [&] { return narep::join(std::move(members), std::move(joins), label); });
  }

  CompositionNode rep_node() {
    const SourcePos pos = ts_.next().pos;
    const std::string label = ts_.expect_ident("rep label");
    const std::int64_t n = ts_.expect_int("replica count");
    ts_.expect(Tok::LBrace);
    CompositionNode child = node();
    ts_.expect(Tok::Semicolon);
    std::set<std::string> shared;
    while (!ts_.accept(Tok::RBrace)) {
      ts_.expect_keyword("share");
      do {
        shared.insert(path());
      } while (ts_.accept(Tok::Comma));
      ts_.expect(Tok::Semicolon);
    }
    return checked(pos, [&] { return narep::rep(std::move(child), n, std::move(shared), label); });
  }

  SharingMode sharing_mode(std::int64_t n) {
    const SourcePos pos = ts_.peek().pos;
    if (ts_.accept_keyword("local")) return Local{};
    if (ts_.accept_keyword("placeshared")) {
      PlaceShared ps;
      ts_.expect(Tok::LBrace);
      do {
        ps.groups.push_back(int_set());
      } while (ts_.accept(Tok::Comma));
      ts_.expect(Tok::RBrace);
      return ps;
    }
    if (ts_.accept_keyword("repshared")) {
      RepShared rs;
      ts_.expect(Tok::LBrace);
      do {
        const std::int64_t i = ts_.expect_int("replica index");
        ts_.expect(Tok::Colon);
        const auto set = int_set();
        rs.access[i].insert(set.begin(), set.end());
      } while (ts_.accept(Tok::Comma));
      ts_.expect(Tok::RBrace);
      return rs;
    }
    if (ts_.accept_keyword("ring")) {
      std::int64_t k = 1;
      if (ts_.accept(Tok::LParen)) {
        k = ts_.expect_int("neighbour count");
        ts_.expect(Tok::RParen);
      }
      return checked(pos, [&] { return ring_access(n, k); });
    }
    if (ts_.accept_keyword("star")) {
      std::int64_t hub = 0;
      if (ts_.accept(Tok::LParen)) {
        hub = ts_.expect_int("hub index");
        ts_.expect(Tok::RParen);
      }
      return checked(pos, [&] { return star_access(n, hub); });
    }
    if (ts_.accept_keyword("full")) return full_access(n);
    ts_.error_expected("sharing mode");
  }

  CompositionNode narep_node() {
    const SourcePos pos = ts_.next().pos;
    const std::string label = ts_.expect_ident("narep label");
    const std::int64_t n = ts_.expect_int("replica count");
    if (n < 1) fail(Errc::ValidationError, "narep '" + label + "' needs n >= 1", pos, "InvalidArgument");
    ts_.expect(Tok::LBrace);
    CompositionNode child = node();
    ts_.expect(Tok::Semicolon);
    std::map<std::string, SharingMode> sharing;
    std::vector<UpShareSpec> up;
    while (!ts_.accept(Tok::RBrace)) {
      const SourcePos clause = ts_.peek().pos;
      const std::string place = path();
      if (ts_.accept_keyword("upshared")) {
        UpShareSpec u;
        u.place = place;
        const auto replicas = int_set();
        u.replicas.insert(replicas.begin(), replicas.end());
        ts_.expect(Tok::Arrow);
        u.outer_path = path();
        if (ts_.at(Tok::LBrace)) {
          ts_.expect(Tok::LBrace);
          do {
            const std::int64_t i = ts_.expect_int("replica index");
            ts_.expect(Tok::Colon);
            u.entry_map[i] = ts_.expect_int("entry index");
          } while (ts_.accept(Tok::Comma));
          ts_.expect(Tok::RBrace);
        } else {
          for (std::int64_t r : u.replicas) u.entry_map[r] = r;
        }
        up.push_back(std::move(u));
      } else {
        if (sharing.count(place)) {
          fail(Errc::ValidationError, "sharing of '" + place + "' given twice", clause, "DUPLICATE_SHARING");
        }
        sharing[place] = sharing_mode(n);
      }
      ts_.expect(Tok::Semicolon);
    }
    return checked(pos, [&] { return narep::narep(std::move(child), n, std::move(sharing), std::move(up), label); });
  }

  // ------------------------------------------------------------------ rewards

  double number(std::string_view what) {
    const Token& t = ts_.peek();
    if (t.kind == Tok::Int) return static_cast<double>(ts_.next().int_value);
    if (t.kind == Tok::Real) return ts_.next().real_value;
    ts_.error_expected(what);
  }

  RewardVar reward() {
    RewardVar rv;
    ts_.expect_keyword("reward");
    const SourcePos pos = ts_.peek().pos;
    rv.name = ts_.expect_ident("reward name");
    ts_.expect(Tok::LBrace);
    bool have_kind = false;
    while (!ts_.accept(Tok::RBrace)) {
      const SourcePos clause = ts_.peek().pos;
      if (ts_.accept_keyword("on")) {
        rv.scope = ts_.expect_ident("model name");
        if (!atomics_.count(rv.scope)) {
          fail(Errc::ValidationError, "unknown atomic model '" + rv.scope + "'", clause, "UNKNOWN_MODEL");
        }
      } else if (ts_.accept_keyword("rate")) {
        if (rv.rate) fail(Errc::ValidationError, "rate given twice", clause, "DUPLICATE_RATE");
        rv.rate = expr();
      } else if (ts_.accept_keyword("impulse")) {
        Impulse imp;
        imp.activity = ts_.expect_ident("activity name");
        ts_.expect(Tok::Colon);
        imp.value = expr();
        rv.impulses.push_back(std::move(imp));
      } else if (ts_.at_keyword("timeavg") || ts_.at_keyword("accumulated")) {
        if (have_kind) fail(Errc::ValidationError, "reward kind given twice", clause, "DUPLICATE_KIND");
        have_kind = true;
        rv.kind = ts_.next().text == "timeavg" ? RewardKind::TimeAveraged : RewardKind::Accumulated;
        rv.from = number("interval start");
        if (!ts_.accept_keyword("end")) rv.to = number("interval end or 'end'");
        if (rv.from < 0 || (rv.to && *rv.to < rv.from)) {
          fail(Errc::ValidationError, "bad reward interval", clause, "BAD_INTERVAL");
        }
      } else if (ts_.accept_keyword("instant")) {
        if (have_kind) fail(Errc::ValidationError, "reward kind given twice", clause, "DUPLICATE_KIND");
        have_kind = true;
        rv.kind = RewardKind::Instant;
        rv.at = number("time point");
        if (rv.at < 0) fail(Errc::ValidationError, "bad reward time", clause, "BAD_INTERVAL");
      } else {
        ts_.error_expected("'on', 'rate', 'impulse', 'timeavg', 'accumulated', 'instant' or '}'");
      }
      ts_.expect(Tok::Semicolon);
    }
    if (!rv.rate && rv.impulses.empty()) {
      fail(Errc::ValidationError, "reward '" + rv.name + "' has neither rate nor impulse", pos, "EMPTY_REWARD");
    }
    if (!have_kind) fail(Errc::ValidationError, "reward '" + rv.name + "' has no kind", pos, "MISSING_KIND");
    const auto typed = [&](const Expr& e) {
      try {
        check_type(e, ExprRole::Numeric);
      } catch (const Error& err) {
        fail(Errc::ValidationError, err.detail(), err.pos() == SourcePos{} ? e.pos() : err.pos(), "TYPE_ERROR");
      }
    };
    if (rv.rate) typed(*rv.rate);
    for (const Impulse& imp : rv.impulses) typed(imp.value);
    return rv;
  }

  TokenStream ts_;
  std::vector<std::string> bound_;
  std::map<std::string, std::shared_ptr<const AtomicModel>> atomics_;
};

}  // namespace

ModelFile parse_model(std::string_view text) { return ModelParser(text).run(); }

ModelFile load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(Errc::IoError, "cannot read '" + path + "'");
  try {
    return parse_model(buf.str());
  } catch (const Error& err) {
    throw Error(err.code(), path + ": " + err.detail(), err.pos(), err.rule());
  }
}

}  // namespace narep
