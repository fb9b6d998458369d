#include "prefixopt/verilog.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>

#include <fmt/format.h>

namespace prefixopt
{

namespace
{

std::string node_suffix( NodeId const& id )
{
  return id.instance == 0 ? fmt::format( "{}_{}", id.msb, id.lsb ) : fmt::format( "{}_{}_c{}", id.msb, id.lsb, id.instance );
}

std::vector<NodeId> topological( PrefixGraph const& graph )
{
  auto nodes = graph.nodes();
  std::stable_sort( nodes.begin(), nodes.end(), [&]( NodeId const& x, NodeId const& y ) { return graph.level( x ) < graph.level( y ); } );
  return nodes;
}

/// Nodes whose propagate signal someone reads.
std::set<NodeId> needs_propagate( PrefixGraph const& graph, std::vector<NodeId> const& order )
{
  std::set<NodeId> need;
  for ( auto it = order.rbegin(); it != order.rend(); ++it )
  {
    auto const parents = graph.parents( *it );
    if ( it->is_input() || !parents )
    {
      if ( it->is_input() )
        need.insert( *it );
      continue;
    }
    need.insert( parents->up );
    if ( need.count( *it ) )
      need.insert( parents->lp );
  }
  return need;
}

class Writer
{
public:
  explicit Writer( int width ) : width_( width ) {}

  void wire( std::string name ) { wires_.push_back( std::move( name ) ); }
  void gate( std::string text ) { body_.push_back( std::move( text ) ); }

  std::string module() const
  {
    int const n = width_;
    std::string out = fmt::format( "module prefix_adder_{} (a, b, s, cout);\n", n );
    out += fmt::format( "  input [{}:0] a;\n  input [{}:0] b;\n  output [{}:0] s;\n  output cout;\n", n - 1, n - 1, n - 1 );
    for ( auto const& w : wires_ )
      out += "  wire " + w + ";\n";
    out += "\n";
    for ( auto const& g : body_ )
      out += "  " + g + "\n";
    out += "endmodule\n";
    return out;
  }

private:
  int width_;
  std::vector<std::string> wires_;
  std::vector<std::string> body_;
};

void check_emittable( PrefixGraph const& graph )
{
  if ( auto const report = validate( graph ); !report.ok() )
    throw std::invalid_argument( "cannot emit an invalid graph:\n" + report.to_string() );
  if ( !graph.is_complete() )
    throw std::invalid_argument( "cannot emit an incomplete graph" );
}

std::string emit_plain( PrefixGraph const& graph )
{
  Writer w( graph.width() );
  auto const order = topological( graph );
  auto const need_p = needs_propagate( graph, order );
  for ( auto const& id : order )
  {
    auto const s = node_suffix( id );
    if ( id.is_input() )
    {
      w.wire( "g_" + s );
      w.wire( "p_" + s );
      w.gate( fmt::format( "and (g_{0}, a[{1}], b[{1}]);", s, id.msb ) );
      w.gate( fmt::format( "xor (p_{0}, a[{1}], b[{1}]);", s, id.msb ) );
      continue;
    }
    auto const par = *graph.parents( id );
    auto const u = node_suffix( par.up );
    auto const l = node_suffix( par.lp );
    w.wire( "g_" + s );
    w.wire( "t_" + s );
    w.gate( fmt::format( "and (t_{}, p_{}, g_{});", s, u, l ) );
    w.gate( fmt::format( "or (g_{}, g_{}, t_{});", s, u, s ) );
    if ( need_p.count( id ) )
    {
      w.wire( "p_" + s );
      w.gate( fmt::format( "and (p_{}, p_{}, p_{});", s, u, l ) );
    }
  }
  w.gate( "buf (s[0], p_0_0);" );
  for ( int i = 1; i < graph.width(); ++i )
    w.gate( fmt::format( "xor (s[{}], p_{}_{}, g_{}_0);", i, i, i, i - 1 ) );
  w.gate( fmt::format( "buf (cout, g_{}_0);", graph.width() - 1 ) );
  return w.module();
}

constexpr char const* cell_library = "module AOI21 (y, a0, a1, b);\n"
                                     "  output y;\n"
                                     "  input a0, a1, b;\n"
                                     "  wire t;\n"
                                     "  and (t, a0, a1);\n"
                                     "  nor (y, t, b);\n"
                                     "endmodule\n"
                                     "\n"
                                     "module OAI21 (y, a0, a1, b);\n"
                                     "  output y;\n"
                                     "  input a0, a1, b;\n"
                                     "  wire t;\n"
                                     "  or (t, a0, a1);\n"
                                     "  nand (y, t, b);\n"
                                     "endmodule\n"
                                     "\n";

std::string emit_inverting( PrefixGraph const& graph )
{
  Writer w( graph.width() );
  auto const order = topological( graph );
  auto const need_p = needs_propagate( graph, order );
  std::map<NodeId, bool> inverted;
  std::set<std::string> flipped;  // signals that already have an inverted copy
  int cell = 0;

  // Name of the node's g or p signal in the requested polarity.
  auto signal = [&]( char kind, NodeId const& id, bool want_inverted ) {
    auto const base = fmt::format( "{}{}_{}", kind, inverted.at( id ) ? "n" : "", node_suffix( id ) );
    if ( inverted.at( id ) == want_inverted )
      return base;
    auto const flip = fmt::format( "{}{}_{}", kind, want_inverted ? "n" : "", node_suffix( id ) );
    if ( flipped.insert( flip ).second )
    {
      w.wire( flip );
      w.gate( fmt::format( "not ({}, {});", flip, base ) );
    }
    return flip;
  };

  for ( auto const& id : order )
  {
    auto const s = node_suffix( id );
    if ( id.is_input() )
    {
      inverted[id] = false;
      w.wire( "g_" + s );
      w.wire( "p_" + s );
      w.gate( fmt::format( "and (g_{0}, a[{1}], b[{1}]);", s, id.msb ) );
      w.gate( fmt::format( "xor (p_{0}, a[{1}], b[{1}]);", s, id.msb ) );
      continue;
    }
    auto const par = *graph.parents( id );
    bool const in_inv = inverted.at( par.up );
    bool const out_inv = !in_inv;
    inverted[id] = out_inv;
    auto const gu = signal( 'g', par.up, in_inv );
    auto const pu = signal( 'p', par.up, in_inv );
    auto const gl = signal( 'g', par.lp, in_inv );
    auto const g = fmt::format( "g{}_{}", out_inv ? "n" : "", s );
    w.wire( g );
    if ( !in_inv )
      w.gate( fmt::format( "AOI21 u{} ({}, {}, {}, {});", cell++, g, pu, gl, gu ) );
    else
      w.gate( fmt::format( "OAI21 u{} ({}, {}, {}, {});", cell++, g, pu, gl, gu ) );
    if ( need_p.count( id ) )
    {
      auto const pl = signal( 'p', par.lp, in_inv );
      auto const p = fmt::format( "p{}_{}", out_inv ? "n" : "", s );
      w.wire( p );
      w.gate( fmt::format( "{} ({}, {}, {});", in_inv ? "nor" : "nand", p, pu, pl ) );
    }
  }
  w.gate( "buf (s[0], p_0_0);" );
  for ( int i = 1; i < graph.width(); ++i )
  {
    NodeId const carry{ i - 1, 0 };
    bool const inv = inverted.at( carry );
    w.gate( fmt::format( "{} (s[{}], p_{}_{}, g{}_{}_0);", inv ? "xnor" : "xor", i, i, i, inv ? "n" : "", i - 1 ) );
  }
  NodeId const last{ graph.width() - 1, 0 };
  bool const inv = inverted.at( last );
  w.gate( fmt::format( "{} (cout, g{}_{}_0);", inv ? "not" : "buf", inv ? "n" : "", graph.width() - 1 ) );
  return cell_library + w.module();
}

// ---------------------------------------------------------------------------
// Netlist parsing

std::vector<std::string> tokenize( std::string_view text )
{
  std::vector<std::string> out;
  std::size_t i = 0;
  while ( i < text.size() )
  {
    char const c = text[i];
    if ( std::isspace( static_cast<unsigned char>( c ) ) )
    {
      ++i;
      continue;
    }
    if ( text.substr( i, 2 ) == "//" )
    {
      i = text.find( '\n', i );
      if ( i == std::string_view::npos )
        break;
      continue;
    }
    if ( text.substr( i, 2 ) == "/*" )
    {
      auto const end = text.find( "*/", i + 2 );
      if ( end == std::string_view::npos )
        throw std::invalid_argument( "unterminated comment" );
      i = end + 2;
      continue;
    }
    if ( std::isalnum( static_cast<unsigned char>( c ) ) || c == '_' || c == '$' )
    {
      auto j = i;
      while ( j < text.size() && ( std::isalnum( static_cast<unsigned char>( text[j] ) ) || text[j] == '_' || text[j] == '$' ) )
        ++j;
      out.emplace_back( text.substr( i, j - i ) );
      i = j;
      continue;
    }
    if ( std::string_view( "()[]:;,=" ).find( c ) == std::string_view::npos )
      throw std::invalid_argument( fmt::format( "unexpected character '{}' in netlist", c ) );
    out.emplace_back( 1, c );
    ++i;
  }
  return out;
}

struct Ref
{
  std::string name;
  std::optional<int> bit;
};

struct Statement
{
  std::string type;  // primitive keyword, module name or "assign"
  std::vector<Ref> terms;
};

struct Module
{
  std::string name;
  std::vector<std::string> ports;
  std::map<std::string, std::pair<int, int>> decl;  // (msb, lsb); scalars (-1,-1)
  std::set<std::string> inputs;
  std::set<std::string> outputs;
  std::vector<Statement> statements;
};

class Parser
{
public:
  explicit Parser( std::vector<std::string> tokens ) : t_( std::move( tokens ) ) {}

  std::vector<Module> modules()
  {
    std::vector<Module> out;
    while ( pos_ < t_.size() )
      out.push_back( module() );
    if ( out.empty() )
      throw std::invalid_argument( "netlist has no module" );
    return out;
  }

private:
  std::string const& peek() const
  {
    if ( pos_ >= t_.size() )
      throw std::invalid_argument( "unexpected end of netlist" );
    return t_[pos_];
  }
  std::string next()
  {
    auto s = peek();
    ++pos_;
    return s;
  }
  void expect( std::string const& s )
  {
    auto const got = next();
    if ( got != s )
      throw std::invalid_argument( fmt::format( "expected '{}' but found '{}'", s, got ) );
  }
  int number()
  {
    auto const s = next();
    if ( s.empty() || !std::all_of( s.begin(), s.end(), []( char c ) { return std::isdigit( static_cast<unsigned char>( c ) ); } ) )
      throw std::invalid_argument( fmt::format( "expected a number but found '{}'", s ) );
    return std::stoi( s );
  }
  Ref ref()
  {
    Ref r{ next(), std::nullopt };
    if ( peek() == "[" )
    {
      next();
      r.bit = number();
      expect( "]" );
    }
    return r;
  }

  Module module()
  {
    expect( "module" );
    Module m;
    m.name = next();
    expect( "(" );
    while ( peek() != ")" )
    {
      m.ports.push_back( next() );
      if ( peek() == "," )
        next();
    }
    expect( ")" );
    expect( ";" );
    while ( peek() != "endmodule" )
    {
      auto const word = next();
      if ( word == "input" || word == "output" || word == "wire" )
      {
        std::pair<int, int> range{ -1, -1 };
        if ( peek() == "[" )
        {
          next();
          range.first = number();
          expect( ":" );
          range.second = number();
          expect( "]" );
          if ( range.first < range.second )
            throw std::invalid_argument( "only descending ranges are supported" );
        }
        for ( ;; )
        {
          auto const name = next();
          m.decl[name] = range;
          if ( word == "input" )
            m.inputs.insert( name );
          if ( word == "output" )
            m.outputs.insert( name );
          if ( peek() == ";" )
            break;
          expect( "," );
        }
        expect( ";" );
      }
      else if ( word == "assign" )
      {
        Statement st{ "assign", {} };
        st.terms.push_back( ref() );
        expect( "=" );
        st.terms.push_back( ref() );
        expect( ";" );
        m.statements.push_back( std::move( st ) );
      }
      else
      {
        Statement st{ word, {} };
        if ( peek() != "(" )
          next();  // instance name
        expect( "(" );
        for ( ;; )
        {
          st.terms.push_back( ref() );
          if ( peek() == ")" )
            break;
          expect( "," );
        }
        expect( ")" );
        expect( ";" );
        m.statements.push_back( std::move( st ) );
      }
    }
    next();
    for ( auto const& p : m.ports )
      if ( !m.inputs.count( p ) && !m.outputs.count( p ) )
        throw std::invalid_argument( fmt::format( "port {} of module {} has no direction", p, m.name ) );
    return m;
  }

  std::vector<std::string> t_;
  std::size_t pos_ = 0;
};

std::string bit_name( std::string const& name, std::optional<int> bit ) { return bit ? fmt::format( "{}[{}]", name, *bit ) : name; }

} // namespace

std::optional<Netlist::Op> primitive( std::string const& word )
{
  static std::map<std::string, Netlist::Op> const table{ { "and", Netlist::Op::and_ },   { "or", Netlist::Op::or_ },     { "xor", Netlist::Op::xor_ },
                                                         { "nand", Netlist::Op::nand_ }, { "nor", Netlist::Op::nor_ },   { "xnor", Netlist::Op::xnor_ },
                                                         { "not", Netlist::Op::not_ },   { "buf", Netlist::Op::buf_ } };
  auto const it = table.find( word );
  if ( it == table.end() )
    return std::nullopt;
  return it->second;
}

struct NetlistBuilder
{
  Netlist& n;
  std::map<std::string, Module> const& modules;
  std::vector<int> driver;  // gate index per net, -1 for none, -2 for top inputs

  int net( std::string const& name )
  {
    auto [it, fresh] = n.nets_.emplace( name, static_cast<int>( n.nets_.size() ) );
    if ( fresh )
      driver.push_back( -1 );
    return it->second;
  }

  void add_gate( Netlist::Op op, int out, std::vector<int> in, std::string const& where )
  {
    if ( driver[static_cast<std::size_t>( out )] != -1 )
      throw std::invalid_argument( fmt::format( "net driven twice ({})", where ) );
    driver[static_cast<std::size_t>( out )] = static_cast<int>( n.gates_.size() );
    n.gates_.push_back( { op, out, std::move( in ) } );
  }

  /// Flattens `m`; `bound` maps port bit names to nets of the parent.
  void instantiate( Module const& m, std::string const& prefix, std::map<std::string, int> const& bound, int depth )
  {
    if ( depth > 64 )
      throw std::invalid_argument( "module hierarchy too deep (recursive instance?)" );
    auto resolve = [&]( Ref const& r ) {
      auto const d = m.decl.find( r.name );
      if ( d == m.decl.end() )
        throw std::invalid_argument( fmt::format( "undeclared net {} in module {}", r.name, m.name ) );
      bool const ranged = d->second.first >= 0;
      if ( ranged != r.bit.has_value() )
        throw std::invalid_argument( fmt::format( "net {} in module {} needs {} bit select", r.name, m.name, ranged ? "a" : "no" ) );
      if ( r.bit && ( *r.bit > d->second.first || *r.bit < d->second.second ) )
        throw std::invalid_argument( fmt::format( "bit {}[{}] out of range in module {}", r.name, *r.bit, m.name ) );
      auto const local = bit_name( r.name, r.bit );
      if ( auto const b = bound.find( local ); b != bound.end() )
        return b->second;
      return net( prefix + local );
    };

    int index = 0;
    for ( auto const& st : m.statements )
    {
      auto const where = fmt::format( "{}{} statement {}", prefix, m.name, ++index );
      if ( st.type == "assign" )
      {
        add_gate( Netlist::Op::buf_, resolve( st.terms[0] ), { resolve( st.terms[1] ) }, where );
        continue;
      }
      if ( auto const op = primitive( st.type ) )
      {
        bool const unary = *op == Netlist::Op::not_ || *op == Netlist::Op::buf_;
        if ( unary ? st.terms.size() != 2 : st.terms.size() < 3 )
          throw std::invalid_argument( fmt::format( "wrong terminal count for {} ({})", st.type, where ) );
        std::vector<int> in;
        for ( std::size_t i = 1; i < st.terms.size(); ++i )
          in.push_back( resolve( st.terms[i] ) );
        add_gate( *op, resolve( st.terms[0] ), std::move( in ), where );
        continue;
      }
      auto const sub = modules.find( st.type );
      if ( sub == modules.end() )
        throw std::invalid_argument( fmt::format( "unknown module or primitive {} ({})", st.type, where ) );
      auto const& sm = sub->second;
      if ( st.terms.size() != sm.ports.size() )
        throw std::invalid_argument( fmt::format( "{} expects {} connections ({})", sm.name, sm.ports.size(), where ) );
      std::map<std::string, int> ports;
      for ( std::size_t i = 0; i < sm.ports.size(); ++i )
      {
        if ( sm.decl.at( sm.ports[i] ).first >= 0 )
          throw std::invalid_argument( fmt::format( "vector port {} of {} cannot be connected positionally", sm.ports[i], sm.name ) );
        ports[sm.ports[i]] = resolve( st.terms[i] );
      }
      instantiate( sm, fmt::format( "{}u{}/", prefix, index ), ports, depth + 1 );
    }
  }
};

Netlist Netlist::parse( std::string_view text )
{
  auto const list = Parser( tokenize( text ) ).modules();
  std::map<std::string, Module> modules;
  for ( auto const& m : list )
    if ( !modules.emplace( m.name, m ).second )
      throw std::invalid_argument( "module " + m.name + " defined twice" );
  auto const& top = list.back();

  Netlist n;
  n.top_ = top.name;
  NetlistBuilder b{ n, modules, {} };
  for ( auto const& port : top.ports )
  {
    auto const range = top.decl.at( port );
    ( top.inputs.count( port ) ? n.inputs_ : n.outputs_ )[port] = range;
    if ( top.inputs.count( port ) )
    {
      if ( range.first < 0 )
        b.driver[static_cast<std::size_t>( b.net( port ) )] = -2;
      for ( int i = range.second; i <= range.first && range.first >= 0; ++i )
        b.driver[static_cast<std::size_t>( b.net( bit_name( port, i ) ) )] = -2;
    }
  }
  b.instantiate( top, "", {}, 0 );

  // Every read net must be driven; order gates so drivers come first.
  std::vector<std::string> names( n.nets_.size() );
  for ( auto const& [name, idx] : n.nets_ )
    names[static_cast<std::size_t>( idx )] = name;
  std::vector<int> pending( n.gates_.size(), 0 );
  std::vector<std::vector<int>> readers( n.nets_.size() );
  for ( std::size_t g = 0; g < n.gates_.size(); ++g )
    for ( int in : n.gates_[g].in )
    {
      auto const d = b.driver[static_cast<std::size_t>( in )];
      if ( d == -1 )
        throw std::invalid_argument( "undriven net " + names[static_cast<std::size_t>( in )] );
      if ( d >= 0 )
      {
        ++pending[g];
        readers[static_cast<std::size_t>( in )].push_back( static_cast<int>( g ) );
      }
    }
  std::vector<Gate> ordered;
  std::vector<int> ready;
  for ( std::size_t g = 0; g < n.gates_.size(); ++g )
    if ( pending[g] == 0 )
      ready.push_back( static_cast<int>( g ) );
  while ( !ready.empty() )
  {
    auto const g = ready.back();
    ready.pop_back();
    ordered.push_back( n.gates_[static_cast<std::size_t>( g )] );
    for ( int r : readers[static_cast<std::size_t>( n.gates_[static_cast<std::size_t>( g )].out )] )
      if ( --pending[static_cast<std::size_t>( r )] == 0 )
        ready.push_back( r );
  }
  if ( ordered.size() != n.gates_.size() )
    throw std::invalid_argument( "combinational loop in netlist" );
  n.gates_ = std::move( ordered );

  for ( auto const& [port, range] : n.outputs_ )
  {
    auto check = [&]( std::string const& name ) {
      auto const it = n.nets_.find( name );
      if ( it == n.nets_.end() || b.driver[static_cast<std::size_t>( it->second )] == -1 )
        throw std::invalid_argument( "undriven output " + name );
    };
    if ( range.first < 0 )
      check( port );
    for ( int i = range.second; i <= range.first && range.first >= 0; ++i )
      check( bit_name( port, i ) );
  }
  return n;
}

int Netlist::port_width( std::string const& name ) const
{
  auto it = inputs_.find( name );
  if ( it == inputs_.end() )
    it = outputs_.find( name );
  if ( it == outputs_.end() )
    throw std::invalid_argument( "no port " + name );
  return it->second.first < 0 ? 1 : it->second.first - it->second.second + 1;
}

std::map<std::string, std::vector<std::uint64_t>> Netlist::evaluate( std::map<std::string, std::vector<std::uint64_t>> const& inputs ) const
{
  std::vector<std::uint64_t> v( nets_.size(), 0 );
  for ( auto const& [port, range] : inputs_ )
  {
    auto const it = inputs.find( port );
    auto const width = static_cast<std::size_t>( port_width( port ) );
    if ( it == inputs.end() || it->second.size() != width )
      throw std::invalid_argument( fmt::format( "input {} needs {} words", port, width ) );
    if ( range.first < 0 )
      v[static_cast<std::size_t>( nets_.at( port ) )] = it->second[0];
    else
      for ( int i = range.second; i <= range.first; ++i )
        v[static_cast<std::size_t>( nets_.at( bit_name( port, i ) ) )] = it->second[static_cast<std::size_t>( i - range.second )];
  }
  for ( auto const& g : gates_ )
  {
    auto x = v[static_cast<std::size_t>( g.in[0] )];
    for ( std::size_t i = 1; i < g.in.size(); ++i )
    {
      auto const y = v[static_cast<std::size_t>( g.in[i] )];
      switch ( g.op )
      {
      case Op::and_:
      case Op::nand_: x &= y; break;
      case Op::or_:
      case Op::nor_: x |= y; break;
      case Op::xor_:
      case Op::xnor_: x ^= y; break;
      default: break;
      }
    }
    bool const invert = g.op == Op::nand_ || g.op == Op::nor_ || g.op == Op::xnor_ || g.op == Op::not_;
    v[static_cast<std::size_t>( g.out )] = invert ? ~x : x;
  }
  std::map<std::string, std::vector<std::uint64_t>> out;
  for ( auto const& [port, range] : outputs_ )
  {
    auto& words = out[port];
    if ( range.first < 0 )
      words.push_back( v[static_cast<std::size_t>( nets_.at( port ) )] );
    else
      for ( int i = range.second; i <= range.first; ++i )
        words.push_back( v[static_cast<std::size_t>( nets_.at( bit_name( port, i ) ) )] );
  }
  return out;
}

std::string emit_verilog( PrefixGraph const& graph, VerilogStyle style )
{
  check_emittable( graph );
  return style == VerilogStyle::plain ? emit_plain( graph ) : emit_inverting( graph );
}

NetlistSum evaluate_adder( Netlist const& netlist, std::span<std::uint64_t const> a, std::span<std::uint64_t const> b )
{
  auto const out = netlist.evaluate( { { "a", { a.begin(), a.end() } }, { "b", { b.begin(), b.end() } } } );
  return { out.at( "s" ), out.at( "cout" ).at( 0 ) };
}

} // namespace prefixopt
